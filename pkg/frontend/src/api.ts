/**
 * HTTP client for the causal-spec analysis service.
 *
 * Every mutation is guarded by the model's content hash: `putModel`
 * forwards the hash the caller last saw as `If-Match`, and a 409 from the
 * server surfaces as `StaleModelError` carrying the hash now current so
 * the UI can offer a reload instead of silently overwriting someone
 * else's commit.
 */

import {
  AnalyzeReport,
  AnalyzeReportSchema,
  Diagnostic,
  DsepResponse,
  DsepResponseSchema,
  ModelEnvelope,
  ModelEnvelopeSchema,
  ModelList,
  ModelListSchema,
  PutResponse,
  PutResponseSchema,
  Statement,
  StatementSchema,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly diagnostic: Diagnostic;

  constructor(status: number, diagnostic: Diagnostic) {
    super(diagnostic.message);
    this.status = status;
    this.diagnostic = diagnostic;
  }
}

export class StaleModelError extends Error {
  /** hash of the version currently stored on the server, null if deleted */
  readonly currentHash: string | null;

  constructor(currentHash: string | null) {
    super("model changed on the server since it was loaded");
    this.currentHash = currentHash;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function readDiagnostic(res: Response): Promise<Diagnostic> {
  let body: unknown = null;
  try {
    body = await res.json();
  } catch {
    return { message: `${res.status} ${res.statusText}` };
  }
  const obj = (body ?? {}) as Record<string, unknown>;
  return {
    message: typeof obj.error === "string" ? obj.error : `${res.status} ${res.statusText}`,
    line: typeof obj.line === "number" ? obj.line : undefined,
    column: typeof obj.column === "number" ? obj.column : undefined,
    witness: Array.isArray(obj.witness) ? obj.witness.map(String) : undefined,
  };
}

export class StudioClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const res = await this.fetchImpl(`${this.base}${path}`, init);
    if (res.ok) {
      return res;
    }
    if (res.status === 409) {
      const body = (await res.json()) as { current_hash?: string | null };
      throw new StaleModelError(body.current_hash ?? null);
    }
    throw new ApiError(res.status, await readDiagnostic(res));
  }

  async listModels(): Promise<ModelList> {
    const res = await this.request("/models");
    return ModelListSchema.parse(await res.json());
  }

  async getModel(name: string): Promise<ModelEnvelope> {
    const res = await this.request(`/models/${encodeURIComponent(name)}`);
    return ModelEnvelopeSchema.parse(await res.json());
  }

  /**
   * Store DSL text under `name`. Pass the hash from the last load (or
   * commit) so a concurrent edit turns into StaleModelError; omit it only
   * when creating a model that should overwrite whatever is there.
   */
  async putModel(name: string, source: string, ifMatch?: string | null): Promise<PutResponse> {
    const headers: Record<string, string> = { "content-type": "text/plain" };
    if (ifMatch) {
      headers["if-match"] = ifMatch;
    }
    const res = await this.request(`/models/${encodeURIComponent(name)}`, {
      method: "PUT",
      headers,
      body: source,
    });
    return PutResponseSchema.parse(await res.json());
  }

  async analyze(name: string, maxGiven?: number): Promise<AnalyzeReport> {
    const res = await this.request(`/models/${encodeURIComponent(name)}/analyze`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(maxGiven === undefined ? {} : { max_given: maxGiven }),
    });
    return AnalyzeReportSchema.parse(await res.json());
  }

  async dsep(name: string, x: string, y: string, given: string[] = []): Promise<DsepResponse> {
    const res = await this.request(`/models/${encodeURIComponent(name)}/dsep`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ x, y, given }),
    });
    return DsepResponseSchema.parse(await res.json());
  }

  async implications(name: string, scope?: string[], maxGiven?: number): Promise<Statement[]> {
    const res = await this.request(`/models/${encodeURIComponent(name)}/implications`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        scope: scope ?? null,
        max_given: maxGiven ?? null,
      }),
    });
    return StatementSchema.array().parse(await res.json());
  }

  async exportDot(name: string): Promise<string> {
    const res = await this.request(`/models/${encodeURIComponent(name)}/export?format=dot`);
    return res.text();
  }
}
