/**
 * Wire types for the causal-spec service, checked at the boundary with zod.
 *
 * The document schema mirrors the JSON interchange form of a `.cdag` file;
 * the report schemas cover the slices of the analyze/requirements payloads
 * the studio renders. Anything the UI does not display is passed through
 * untouched so a newer service does not break an older studio.
 */

import { z } from "zod";

export const AssumptionSchema = z.object({
  tag: z.string(),
  text: z.string(),
});

export const NodeSchema = z.object({
  name: z.string(),
  kind: z.enum(["observed", "latent"]),
  role: z.enum(["exposure", "outcome", "covariate", "disturbance"]),
  traces: z.array(z.string()),
  label: z.string().nullable(),
  controllable: z.boolean().nullable(),
});

export const EdgeSchema = z.object({
  from: z.string(),
  to: z.string(),
  traces: z.array(z.string()),
  mechanism: z.string().nullable(),
});

export const MechanismSchema = z.union([
  z.object({
    type: z.literal("linear_gaussian"),
    intercept: z.number(),
    weights: z.record(z.number()),
    sd: z.number(),
  }),
  z.object({
    type: z.literal("logistic"),
    intercept: z.number(),
    weights: z.record(z.number()),
  }),
  z.object({
    type: z.literal("cpd"),
    given: z.array(z.string()),
    levels: z.array(z.number()),
    table: z.array(z.array(z.number())),
  }),
]);

export const DocumentSchema = z.object({
  name: z.string(),
  assumptions: z.array(AssumptionSchema),
  nodes: z.array(NodeSchema),
  edges: z.array(EdgeSchema),
  scm: z.record(MechanismSchema),
});

export type Assumption = z.infer<typeof AssumptionSchema>;
export type NodeDecl = z.infer<typeof NodeSchema>;
export type EdgeDecl = z.infer<typeof EdgeSchema>;
export type Mechanism = z.infer<typeof MechanismSchema>;
export type DocumentJson = z.infer<typeof DocumentSchema>;

export const ModelListSchema = z.object({
  models: z.array(z.object({ name: z.string(), hash: z.string() })),
});

export const ModelEnvelopeSchema = z.object({
  name: z.string(),
  hash: z.string(),
  source: z.string(),
  document: DocumentSchema,
});

export const PutResponseSchema = z.object({
  name: z.string(),
  hash: z.string(),
  created: z.boolean(),
});

export const DsepResponseSchema = z.object({
  x: z.string(),
  y: z.string(),
  given: z.array(z.string()),
  separated: z.boolean(),
});

export const StatementSchema = z.object({
  x: z.string(),
  y: z.string(),
  given: z.array(z.string()),
  provenance: z.string(),
  rendered: z.string(),
});

export const PathSchema = z.object({
  nodes: z.array(z.string()),
  arrows: z.array(z.string()),
  inner_roles: z.array(z.string()),
  directed: z.boolean(),
  kind: z.enum(["causal", "biasing", "blocked"]),
  colliders: z.array(z.string()),
  blockers: z.array(z.string()),
  rendered: z.string(),
});

export const GapSchema = z.object({
  path: z.array(z.string()),
  rendered: z.string(),
  latent_blockers: z.array(z.string()),
});

export const ArtifactSchema = z.object({
  id: z.string(),
  kind: z.string(),
  rule: z.string(),
  text: z.string(),
  traces: z.array(z.string()),
  commentary: z.string(),
});

export const AnalyzeReportSchema = z.object({
  model: z.string(),
  validation: z.object({
    acyclic: z.boolean(),
    summary: z.object({
      nodes: z.number(),
      edges: z.number(),
      raw_nodes: z.number(),
      raw_edges: z.number(),
    }),
    exposure: z.string().nullable(),
    outcome: z.string().nullable(),
    observability_gaps: z.array(GapSchema),
  }),
  paths: z
    .object({
      exposure: z.string(),
      outcome: z.string(),
      causal: z.array(PathSchema),
      biasing: z.array(PathSchema),
      blocked: z.array(PathSchema),
    })
    .nullable(),
  adjustment: z
    .object({
      candidates: z.string(),
      minimal_sets: z.array(z.object({ members: z.array(z.string()), minimal: z.boolean() })),
    })
    .nullable(),
  implications: z.array(StatementSchema),
  requirements: z.array(ArtifactSchema),
  test_cases: z.array(ArtifactSchema),
  monitors: z.array(
    z.object({
      id: z.string(),
      statement: StatementSchema,
      window: z.number(),
      threshold: z.number(),
      consecutive: z.number(),
      statistic: z.string(),
    })
  ),
});

export type ModelList = z.infer<typeof ModelListSchema>;
export type ModelEnvelope = z.infer<typeof ModelEnvelopeSchema>;
export type PutResponse = z.infer<typeof PutResponseSchema>;
export type DsepResponse = z.infer<typeof DsepResponseSchema>;
export type Statement = z.infer<typeof StatementSchema>;
export type PathInfo = z.infer<typeof PathSchema>;
export type GapInfo = z.infer<typeof GapSchema>;
export type Artifact = z.infer<typeof ArtifactSchema>;
export type AnalyzeReport = z.infer<typeof AnalyzeReportSchema>;

/** Diagnostic attached to a failed commit, positioned when the server says where. */
export interface Diagnostic {
  message: string;
  line?: number;
  column?: number;
  /** node names on the cycle the server found, when the edit closed a loop */
  witness?: string[];
}
