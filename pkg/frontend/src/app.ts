// Controller: owns {meta, state, ui}, re-renders after every change, and
// serializes mutations (one in-flight edit; later edits queue behind it).

import { ApiError, Client } from "./api.js";
import { renderForm } from "./render.js";
import { Meta, StateJson, UiState, Value } from "./types.js";

export class App {
  meta: Meta;
  state: StateJson;
  ui: UiState = {};
  private queue: Promise<void> = Promise.resolve();

  constructor(
    private client: Client,
    private sessionId: string,
    meta: Meta,
    state: StateJson,
    private root: { innerHTML: string },
  ) {
    this.meta = meta;
    this.state = state;
    this.render();
  }

  render(): void {
    this.root.innerHTML = renderForm(this.meta, this.state, this.ui);
  }

  /** Queue a mutation; edits never overlap. */
  enqueue(work: () => Promise<void>): Promise<void> {
    this.queue = this.queue.then(work, work);
    return this.queue;
  }

  assert(term: string, value: Value): Promise<void> {
    return this.enqueue(async () => {
      this.ui = { ...this.ui, busy: true };
      this.render();
      try {
        const result = await this.client.edit(this.sessionId, "assert",
                                              term, value);
        if (result.kind === "conflict") {
          this.ui = {
            conflict: {
              term: `${term} = ${value}`,
              items: result.response.explanation,
            },
          };
        } else {
          this.state = result.response.state;
          this.ui = {};
        }
      } catch (e) {
        this.ui = { banner: e instanceof ApiError ? e.message
                    : "connection lost" };
      }
      this.render();
    });
  }

  retract(term: string): Promise<void> {
    return this.enqueue(async () => {
      try {
        const result = await this.client.edit(this.sessionId, "retract", term);
        if (result.kind === "ok") {
          this.state = result.response.state;
          this.ui = {};
        }
      } catch (e) {
        this.ui = { banner: e instanceof ApiError ? e.message
                    : "connection lost" };
      }
      this.render();
    });
  }

  explain(term: string, value: string): Promise<void> {
    return this.enqueue(async () => {
      try {
        const literal = `${term} = ${value}`;
        this.ui = { explanation: await this.client.explain(this.sessionId,
                                                           literal) };
      } catch (e) {
        this.ui = { banner: e instanceof ApiError ? e.message
                    : "connection lost" };
      }
      this.render();
    });
  }

  optimize(term: string, direction: "minimize" | "maximize"): Promise<void> {
    return this.enqueue(async () => {
      try {
        const response = await this.client.optimize(this.sessionId, term,
                                                    direction);
        // fill the grid with the witnessing model, marked as tentative
        this.ui = { tentative: response.witness };
      } catch (e) {
        this.ui = { banner: e instanceof ApiError ? e.message
                    : "connection lost" };
      }
      this.render();
    });
  }

  closeDialog(): void {
    this.ui = {};
    this.render();
  }

  /** Event delegation target for clicks and input changes. */
  handle(target: {
    dataset: Record<string, string | undefined>;
    value?: string;
  }): void {
    const d = target.dataset;
    switch (d.action) {
      case "assert":
        this.assert(d.term!, d.value === "true");
        break;
      case "assert-select":
        if (target.value === "") {
          this.retract(d.term!);
        } else {
          this.assert(d.term!, coerce(target.value!));
        }
        break;
      case "assert-input":
        if (target.value !== undefined && target.value !== "") {
          this.assert(d.term!, coerce(target.value));
        }
        break;
      case "retract":
        this.retract(d.term!);
        break;
      case "explain":
        this.explain(d.term!, d.value!);
        break;
      case "optimize":
        this.optimize(d.term!, d.direction as "minimize" | "maximize");
        break;
      case "close-dialog":
      case "retry":
        this.closeDialog();
        break;
    }
  }
}

export function coerce(text: string): Value {
  if (text === "true") return true;
  if (text === "false") return false;
  const n = Number(text);
  return Number.isNaN(n) ? text : n;
}

export async function boot(client: Client, source: string,
                           root: { innerHTML: string }): Promise<App> {
  const kb = await client.postKb(source);
  const session = await client.createSession(kb.kb_id);
  return new App(client, session.session_id, kb.meta, session.state, root);
}
