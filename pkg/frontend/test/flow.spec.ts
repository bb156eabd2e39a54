// Interaction flows against a mocked service: one round-trip per edit,
// conflict dialogs, explanation dialogs, optimize fills, queueing.

import { afterEach, describe, expect, it, vi } from "vitest";
import { readFileSync } from "node:fs";

import { Client } from "../src/api.js";
import { App, boot, coerce } from "../src/app.js";
import { EditResponse, Meta, StateJson } from "../src/types.js";

const fixture = <T>(name: string): T =>
  JSON.parse(readFileSync(new URL(`../fixtures/${name}.json`, import.meta.url),
                          "utf8")) as T;

const votingMeta = fixture<Meta>("voting.meta");
const votingState = fixture<StateJson>("voting.state");
const afterVote = fixture<EditResponse>("voting.vote-true");
const conflict = fixture<object>("voting.conflict");
const explain = fixture<object>("voting.explain");
const optimize = fixture<object>("voting.optimize");

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function makeApp(): { app: App; root: { innerHTML: string } } {
  const root = { innerHTML: "" };
  const app = new App(new Client(""), "sid", votingMeta, votingState, root);
  return { app, root };
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("edits", () => {
  it("one round-trip shows the propagated constraint", async () => {
    const calls: string[] = [];
    vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
      calls.push(`${init?.method ?? "GET"} ${url}`);
      return jsonResponse(afterVote);
    });
    const { app, root } = makeApp();
    await app.assert("vote()", true);
    expect(calls).toEqual(["POST /session/sid/edit"]);
    expect(root.innerHTML).toContain("18 =&lt; age()");
    expect(root.innerHTML).toContain('class="badge user"');
  });

  it("a 409 opens the conflict dialog with the minimal explanation", async () => {
    vi.stubGlobal("fetch", async () => jsonResponse(conflict, 409));
    const { app, root } = makeApp();
    await app.assert("age()", 17);
    expect(root.innerHTML).toContain("Conflicting edit");
    expect(root.innerHTML).toContain("vote() &lt;=&gt; 18 =&lt; age().");
    expect(root.innerHTML).toContain("vote() = true");
    expect(root.innerHTML).toContain("negation of age() = 17");
    // the grid itself is unchanged: the edit was rejected
    expect(root.innerHTML).not.toContain('class="badge user"');
  });

  it("clearing a fact issues a retract", async () => {
    const bodies: string[] = [];
    vi.stubGlobal("fetch", async (_url: string, init?: RequestInit) => {
      bodies.push(String(init?.body));
      return jsonResponse({ state: votingState, changed: [] });
    });
    const { app } = makeApp();
    await app.retract("vote()");
    expect(JSON.parse(bodies[0])).toEqual({
      action: "retract", term: "vote()", value: undefined } as object);
  });

  it("network failures surface a retry banner and keep the state", async () => {
    vi.stubGlobal("fetch", async () => {
      throw new TypeError("network down");
    });
    const { app, root } = makeApp();
    await app.assert("vote()", true);
    expect(root.innerHTML).toContain("connection lost");
    expect(root.innerHTML).toContain("retry");
  });

  it("edits queue: a second edit waits for the first", async () => {
    const order: string[] = [];
    let release!: () => void;
    const gate = new Promise<void>((resolve) => (release = resolve));
    let first = true;
    vi.stubGlobal("fetch", async (_url: string, init?: RequestInit) => {
      const term = JSON.parse(String(init?.body)).term;
      order.push(`start ${term}`);
      if (first) {
        first = false;
        await gate;
      }
      order.push(`end ${term}`);
      return jsonResponse(afterVote);
    });
    const { app } = makeApp();
    const p1 = app.assert("vote()", true);
    const p2 = app.assert("age()", 20);
    release();
    await Promise.all([p1, p2]);
    expect(order).toEqual([
      "start vote()", "end vote()", "start age()", "end age()",
    ]);
  });
});

describe("queries", () => {
  it("explain opens a dialog listing the source lines", async () => {
    vi.stubGlobal("fetch", async () => jsonResponse(explain));
    const { app, root } = makeApp();
    await app.explain("18 =< age()", "true");
    expect(root.innerHTML).toContain("Why 18 =&lt; age()?");
    expect(root.innerHTML).toContain("vote() &lt;=&gt; 18 =&lt; age().");
    app.closeDialog();
    expect(root.innerHTML).not.toContain("Why");
  });

  it("optimize fills tiles with the witness, marked tentative", async () => {
    vi.stubGlobal("fetch", async () => jsonResponse(optimize));
    const { app, root } = makeApp();
    await app.optimize("age()", "minimize");
    expect(root.innerHTML).toContain("tentative: 18");
    expect(root.innerHTML).toContain('class="tile unknown tentative"');
  });
});

describe("boot", () => {
  it("posts the KB then opens a session", async () => {
    const calls: string[] = [];
    vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
      calls.push(`${init?.method} ${url}`);
      if (url === "/kb") {
        return jsonResponse({ kb_id: "k1", meta: votingMeta });
      }
      return jsonResponse({ session_id: "s1", kb_id: "k1",
                            state: votingState });
    });
    const root = { innerHTML: "" };
    await boot(new Client(""), "vocabulary V {}", root);
    expect(calls).toEqual(["POST /kb", "POST /session"]);
    expect(root.innerHTML).toContain("data-tile='age()'");
  });
});

describe("coerce", () => {
  it("maps widget strings onto JSON values", () => {
    expect(coerce("true")).toBe(true);
    expect(coerce("false")).toBe(false);
    expect(coerce("17")).toBe(17);
    expect(coerce("18.5")).toBe(18.5);
    expect(coerce("Alice")).toBe("Alice");
  });
});
