// JSON shapes of the reasoning service (see the endpoint table in the
// backend README). The UI never interprets KB semantics beyond these.

export type Value = boolean | number | string;

export interface SymbolMeta {
  name: string;
  args: string[];
  result: string;
  extension?: Value[];
}

export interface Meta {
  vocabulary: string;
  symbols: SymbolMeta[];
  types: Record<string, Value[] | null>;
}

export type AtomStatus =
  | "user"
  | "propagated_true"
  | "propagated_false"
  | "unknown";

export interface AtomEntry {
  atom: string;
  status: AtomStatus;
  relevant: boolean;
}

export type TermStatus = "user" | "value" | "unknown" | "irrelevant";

export interface TermEntry {
  term: string;
  symbol: string;
  status: TermStatus;
  value?: Value;
}

export interface StateJson {
  atoms: AtomEntry[];
  terms: TermEntry[];
}

export interface ExplanationItem {
  label: string;
  kind: string;
  source: string;
}

export interface EditResponse {
  state: StateJson;
  changed: string[];
}

export interface ConflictResponse {
  error: string;
  explanation: ExplanationItem[];
}

export interface ExplainResponse {
  literal: string;
  explanation: ExplanationItem[];
}

export interface OptimizeResponse {
  term: string;
  direction: "minimize" | "maximize";
  value: Value;
  witness: Record<string, Value>;
  state: StateJson;
}

export interface SessionResponse {
  session_id: string;
  kb_id: string;
  state: StateJson;
}

// client-side dialog/overlay state; everything else comes from the server
export interface UiState {
  conflict?: { term: string; items: ExplanationItem[] };
  explanation?: ExplainResponse;
  tentative?: Record<string, Value>;
  banner?: string;
  busy?: boolean;
}
