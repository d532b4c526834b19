import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { serializeDocument } from "../src/dsl.js";
import { emptyDocument } from "../src/model.js";
import { DocumentSchema } from "../src/types.js";

const motorDoc = DocumentSchema.parse(
  JSON.parse(readFileSync(new URL("./fixtures/motor.json", import.meta.url), "utf8"))
);
const motorCanonical = readFileSync(
  new URL("./fixtures/motor.canonical.cdag", import.meta.url),
  "utf8"
);

describe("serializeDocument", () => {
  it("reproduces the server's canonical text for the motor model byte for byte", () => {
    expect(serializeDocument(motorDoc)).toBe(motorCanonical);
  });

  it("escapes backslashes, quotes, and newlines in strings", () => {
    const doc = emptyDocument('say "hi"\\\nplease');
    const text = serializeDocument(doc);
    expect(text.startsWith('model "say \\"hi\\"\\\\\\nplease" {')).toBe(true);
  });

  it("keeps a decimal point on whole-number parameters", () => {
    const doc = emptyDocument("m");
    doc.nodes.push({
      name: "A",
      kind: "observed",
      role: "covariate",
      traces: [],
      label: null,
      controllable: null,
    });
    doc.scm.A = { type: "linear_gaussian", intercept: 2, weights: {}, sd: 1 };
    const text = serializeDocument(doc);
    expect(text).toContain("intercept: 2.0");
    expect(text).toContain("sd: 1.0");
  });

  it("sorts weights by parent name regardless of insertion order", () => {
    const doc = emptyDocument("m");
    for (const name of ["Z", "A", "B"]) {
      doc.nodes.push({
        name,
        kind: "observed",
        role: "covariate",
        traces: [],
        label: null,
        controllable: null,
      });
    }
    doc.edges.push({ from: "Z", to: "B", traces: [], mechanism: null });
    doc.edges.push({ from: "A", to: "B", traces: [], mechanism: null });
    doc.scm.B = {
      type: "linear_gaussian",
      intercept: 0,
      weights: { Z: 0.5, A: -0.25 },
      sd: 1,
    };
    expect(serializeDocument(doc)).toContain("weights: {A: -0.25, Z: 0.5}");
  });

  it("emits table mechanisms with given, levels, and rows", () => {
    const doc = emptyDocument("m");
    for (const name of ["A", "B"]) {
      doc.nodes.push({
        name,
        kind: "observed",
        role: "covariate",
        traces: [],
        label: null,
        controllable: null,
      });
    }
    doc.edges.push({ from: "A", to: "B", traces: [], mechanism: null });
    doc.scm.B = {
      type: "cpd",
      given: ["A"],
      levels: [0, 1],
      table: [
        [0.25, 0.75],
        [0.5, 0.5],
      ],
    };
    expect(serializeDocument(doc)).toContain(
      "scm B { type: cpd, given: [A], levels: [0, 1], table: [[0.25, 0.75], [0.5, 0.5]] }"
    );
  });

  it("omits role, traces, label, and mechanism blocks that carry no information", () => {
    const doc = emptyDocument("bare");
    doc.nodes.push({
      name: "X",
      kind: "observed",
      role: "covariate",
      traces: [],
      label: null,
      controllable: null,
    });
    const text = serializeDocument(doc);
    expect(text).toContain("node X { kind: observed }");
    expect(text).not.toContain("role:");
    expect(text).not.toContain("scm");
  });
});
