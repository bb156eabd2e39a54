// Pure rendering: (meta, state, ui) -> HTML string. The grid is a function
// of the last server state plus dialog overlays, which keeps every view
// snapshot-testable without a DOM.

import {
  AtomEntry, ExplanationItem, Meta, StateJson, SymbolMeta, TermEntry,
  UiState, Value,
} from "./types.js";

const esc = (s: unknown): string =>
  String(s)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");

const attr = (s: unknown): string => esc(s).replace(/'/g, "&#39;");

export function valueText(v: Value | undefined): string {
  if (v === undefined) return "";
  if (typeof v === "boolean") return v ? "true" : "false";
  return String(v);
}

/** Propagated comparison atoms that mention a term: shown as constraint
 * chips on its tile (e.g. `18 =< age()` after vote=true). */
export function constraintChips(term: TermEntry, atoms: AtomEntry[]): string[] {
  const chips: string[] = [];
  for (const a of atoms) {
    if (a.atom === term.term) continue; // the tile's own status shows this
    if (!a.atom.includes(term.term)) continue;
    if (a.status === "propagated_true") chips.push(a.atom);
    else if (a.status === "propagated_false") chips.push(`~(${a.atom})`);
  }
  return chips;
}

function widget(symbol: SymbolMeta | undefined, term: TermEntry,
                tentative: Value | undefined): string {
  const locked = term.status === "value"; // propagated values are not editable
  const disabled = locked ? " disabled" : "";
  const current = tentative !== undefined ? tentative : term.value;
  const name = attr(term.term);
  if (symbol?.result === "Bool" || typeof current === "boolean") {
    const mark = (v: boolean) =>
      current === v ? " selected" : "";
    return (
      `<span class="toggle">` +
      `<button data-action="assert" data-term='${name}' data-value="true"` +
      `${disabled} class="val${mark(true)}">true</button>` +
      `<button data-action="assert" data-term='${name}' data-value="false"` +
      `${disabled} class="val${mark(false)}">false</button></span>`
    );
  }
  if (symbol?.extension && symbol.extension.length > 0 &&
      symbol.result !== "Int" && symbol.result !== "Real") {
    const options = symbol.extension
      .map((v) => {
        const sel = current !== undefined && String(current) === String(v)
          ? " selected" : "";
        return `<option value='${attr(v)}'${sel}>${esc(v)}</option>`;
      })
      .join("");
    return (
      `<select data-action="assert-select" data-term='${name}'${disabled}>` +
      `<option value="">—</option>${options}</select>`
    );
  }
  const shown = current === undefined ? "" : ` value='${attr(current)}'`;
  return (
    `<input type="number" data-action="assert-input" data-term='${name}'` +
    `${shown}${disabled} placeholder="?">`
  );
}

function badge(term: TermEntry): string {
  switch (term.status) {
    case "user":
      return `<span class="badge user">user</span>`;
    case "value":
      return `<span class="badge propagated">= ${esc(valueText(term.value))}</span>`;
    case "irrelevant":
      return `<span class="badge irrelevant">irrelevant</span>`;
    default:
      return `<span class="badge unknown">?</span>`;
  }
}

export function renderTile(term: TermEntry, symbol: SymbolMeta | undefined,
                           atoms: AtomEntry[], ui: UiState): string {
  const tentative = ui.tentative?.[term.term];
  const classes = ["tile", term.status];
  if (tentative !== undefined) classes.push("tentative");
  const chips = constraintChips(term, atoms)
    .map((c) => `<span class="chip">${esc(c)}</span>`)
    .join("");
  const clear = term.status === "user"
    ? `<button data-action="retract" data-term='${attr(term.term)}' ` +
      `class="clear">clear</button>`
    : "";
  const explain = term.status === "value"
    ? `<button data-action="explain" data-term='${attr(term.term)}' ` +
      `data-value='${attr(valueText(term.value))}' class="explain">why?</button>`
    : "";
  const numeric = symbol?.result === "Int" || symbol?.result === "Real" ||
    (symbol?.extension ?? []).some((v) => typeof v === "number");
  const optimize = numeric
    ? `<button data-action="optimize" data-term='${attr(term.term)}' ` +
      `data-direction="minimize" class="optimize">min</button>` +
      `<button data-action="optimize" data-term='${attr(term.term)}' ` +
      `data-direction="maximize" class="optimize">max</button>`
    : "";
  const tentativeNote = tentative !== undefined
    ? `<span class="badge tentative">tentative: ${esc(valueText(tentative))}</span>`
    : "";
  return (
    `<div class="${classes.join(" ")}" data-tile='${attr(term.term)}'>` +
    `<div class="head"><span class="name">${esc(term.term)}</span>` +
    `${badge(term)}${tentativeNote}</div>` +
    `<div class="controls">${widget(symbol, term, tentative)}${clear}` +
    `${explain}${optimize}</div>` +
    (chips ? `<div class="chips">${chips}</div>` : "") +
    `</div>`
  );
}

function explanationList(items: ExplanationItem[]): string {
  return items
    .map((i) => `<li class="${esc(i.kind)}"><code>${esc(i.source)}</code></li>`)
    .join("");
}

export function renderDialogs(ui: UiState): string {
  let out = "";
  if (ui.conflict) {
    out +=
      `<div class="dialog conflict" role="dialog">` +
      `<h2>Conflicting edit</h2>` +
      `<p>${esc(ui.conflict.term)} contradicts what is already known:</p>` +
      `<ul>${explanationList(ui.conflict.items)}</ul>` +
      `<button data-action="close-dialog">close</button></div>`;
  }
  if (ui.explanation) {
    out +=
      `<div class="dialog explanation" role="dialog">` +
      `<h2>Why ${esc(ui.explanation.literal)}?</h2>` +
      `<ul>${explanationList(ui.explanation.explanation)}</ul>` +
      `<button data-action="close-dialog">close</button></div>`;
  }
  if (ui.banner) {
    out += `<div class="banner">${esc(ui.banner)} ` +
      `<button data-action="retry">retry</button></div>`;
  }
  return out;
}

/** The whole app view: one tile per applied ground term, grouped by symbol,
 * driven entirely by vocabulary metadata and the last state JSON. */
export function renderForm(meta: Meta, state: StateJson, ui: UiState = {}): string {
  const symbols = new Map(meta.symbols.map((s) => [s.name, s]));
  if (meta.symbols.length === 0) {
    return (
      `<main class="grid empty-state">` +
      `<p>This knowledge base declares no symbols.</p></main>` +
      renderDialogs(ui)
    );
  }
  const tiles = state.terms
    .map((t) => renderTile(t, symbols.get(t.symbol), state.atoms, ui))
    .join("\n");
  const busy = ui.busy ? ` aria-busy="true"` : "";
  return (
    `<header><h1>${esc(meta.vocabulary)}</h1></header>` +
    `<main class="grid"${busy}>\n${tiles}\n</main>` +
    renderDialogs(ui)
  );
}
