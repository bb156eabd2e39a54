// Snapshot tests: the rendered form is a pure function of (meta, state, ui),
// exercised over three fixture KBs captured from the real service.

import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";

import { constraintChips, renderForm, renderTile } from "../src/render.js";
import { EditResponse, Meta, StateJson } from "../src/types.js";

const fixture = <T>(name: string): T =>
  JSON.parse(readFileSync(new URL(`../fixtures/${name}.json`, import.meta.url),
                          "utf8")) as T;

const votingMeta = fixture<Meta>("voting.meta");
const votingState = fixture<StateJson>("voting.state");
const bmiMeta = fixture<Meta>("bmi.meta");
const bmiState = fixture<StateJson>("bmi.state");
const emptyMeta = fixture<Meta>("empty.meta");
const emptyState = fixture<StateJson>("empty.state");

describe("renderForm", () => {
  it("renders the voting KB form", () => {
    expect(renderForm(votingMeta, votingState)).toMatchSnapshot();
  });

  it("renders the BMI KB form", () => {
    expect(renderForm(bmiMeta, bmiState)).toMatchSnapshot();
  });

  it("renders the empty vocabulary state", () => {
    expect(renderForm(emptyMeta, emptyState)).toMatchSnapshot();
  });

  it("renders exactly the declared symbols as tiles", () => {
    const html = renderForm(votingMeta, votingState);
    const tiles = [...html.matchAll(/data-tile='([^']+)'/g)].map((m) => m[1]);
    expect(tiles.sort()).toEqual(["age()", "vote()"]);
    expect(tiles.length).toBe(votingMeta.symbols.length);
  });

  it("gives enumerated outputs a dropdown of their values", () => {
    const html = renderForm(bmiMeta, bmiState);
    for (const level of ["Underweight", "Normal", "Overweight", "Obese"]) {
      expect(html).toContain(`<option value='${level}'`);
    }
  });

  it("shows the empty-state message when nothing is declared", () => {
    expect(renderForm(emptyMeta, emptyState)).toContain("declares no symbols");
  });
});

describe("propagation display", () => {
  const afterVote = fixture<EditResponse>("voting.vote-true");

  it("shows the propagated comparison as a constraint chip on age", () => {
    const ageTerm = afterVote.state.terms.find((t) => t.term === "age()")!;
    expect(constraintChips(ageTerm, afterVote.state.atoms))
      .toContain("18 =&lt; age()".replace("&lt;", "<"));
  });

  it("locks propagated values and marks user facts", () => {
    const html = renderForm(votingMeta, afterVote.state);
    expect(html).toContain('class="badge user"');
    expect(html).toMatchSnapshot();
  });
});

describe("dialogs", () => {
  it("renders the conflict dialog with the explanation's source lines", () => {
    const conflict = fixture<{ explanation: { label: string; kind: string;
      source: string }[] }>("voting.conflict");
    const html = renderForm(votingMeta, votingState, {
      conflict: { term: "age() = 17", items: conflict.explanation },
    });
    expect(html).toContain("Conflicting edit");
    for (const item of conflict.explanation) {
      const escaped = item.source
        .replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
      expect(html).toContain(`<code>${escaped}</code>`);
    }
    expect(html).toMatchSnapshot();
  });

  it("renders tentative values after an optimize fill", () => {
    const optimize = fixture<{ witness: Record<string, number | boolean> }>(
      "voting.optimize");
    const html = renderForm(votingMeta, votingState,
                            { tentative: optimize.witness });
    expect(html).toContain("tentative");
    expect(html).toContain("18");
  });
});
