/** Thin typed client over the gateway endpoints.  Every view fetches its
 * numbers through here; nothing is recomputed client-side. */

import type {
  ApiErrorDoc,
  CandidateSummary,
  DatasetInfo,
  DatasetSummary,
  EvalReport,
  ProblemSpec,
  RowsPage,
  SearchStatus,
  Selector,
  SessionState,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly details: Record<string, unknown>;
  readonly status: number;

  constructor(status: number, doc: ApiErrorDoc) {
    super(doc.message);
    this.code = doc.code;
    this.details = doc.details ?? {};
    this.status = status;
  }
}

async function parseError(response: Response): Promise<never> {
  let doc: ApiErrorDoc = {
    code: "INTERNAL",
    message: `HTTP ${response.status}`,
    details: {},
  };
  try {
    const body = (await response.json()) as { error?: ApiErrorDoc };
    if (body && body.error) doc = body.error;
  } catch {
    // non-JSON body: keep the generic document
  }
  throw new ApiError(response.status, doc);
}

export class GatewayClient {
  constructor(readonly baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  uploadDataset(csv: string, schema: unknown) {
    return this.post<{ datasetId: string; rowCount: number }>("/datasets", {
      csv,
      schema,
    });
  }

  listDatasets() {
    return this.get<{ datasetIds: string[] }>("/datasets");
  }

  dataset(datasetId: string) {
    return this.get<DatasetInfo>(`/datasets/${datasetId}`);
  }

  summary(datasetId: string, bins = 10) {
    return this.get<DatasetSummary>(`/datasets/${datasetId}/summary?bins=${bins}`);
  }

  rows(datasetId: string, offset = 0, limit = 50) {
    return this.get<RowsPage>(
      `/datasets/${datasetId}/rows?offset=${offset}&limit=${limit}`,
    );
  }

  rowsMatching(datasetId: string, selector: Selector) {
    return this.post<{ rowIds: number[] }>(
      `/datasets/${datasetId}/rows/matching`,
      { selector },
    );
  }

  problems(datasetId: string) {
    return this.get<{ specs: ProblemSpec[] }>(`/datasets/${datasetId}/problems`);
  }

  spec(specId: string) {
    return this.get<ProblemSpec>(`/specs/${specId}`);
  }

  createSpec(fields: {
    datasetId: string;
    taskType: string;
    target: string;
    features: string[];
    metric: string;
  }) {
    return this.post<ProblemSpec>("/specs", fields);
  }

  refineSpec(specId: string, removeFeatures: string[], setMetric?: string) {
    return this.post<ProblemSpec>(`/specs/${specId}/refine`, {
      removeFeatures,
      ...(setMetric ? { setMetric } : {}),
    });
  }

  submitSearch(body: {
    specId: string;
    budget: number;
    topK: number;
    seed?: number;
    holdoutFraction?: number;
  }) {
    return this.post<{ searchId: string }>("/searches", body);
  }

  searchStatus(searchId: string) {
    return this.get<SearchStatus>(`/searches/${searchId}/status`);
  }

  candidates(searchId: string) {
    return this.get<{ candidates: CandidateSummary[] }>(
      `/searches/${searchId}/candidates`,
    );
  }

  report(candidateId: string) {
    return this.get<EvalReport>(`/candidates/${candidateId}/report`);
  }

  createSession(datasetId: string, sessionId?: string) {
    return this.post<SessionState>("/sessions", {
      datasetId,
      ...(sessionId ? { sessionId } : {}),
    });
  }

  session(sessionId: string) {
    return this.get<SessionState>(`/sessions/${sessionId}`);
  }

  advance(sessionId: string, event: string, extra: { specId?: string; searchId?: string } = {}) {
    return this.post<SessionState>(`/sessions/${sessionId}/advance`, {
      event,
      ...extra,
    });
  }

  select(sessionId: string, candidateIds: string[], userRanks: number[]) {
    return this.post<SessionState>(`/sessions/${sessionId}/selections`, {
      candidateIds,
      userRanks,
    });
  }

  exportSelected(sessionId: string) {
    return this.post<{
      artifacts: { candidateId: string; userRank: number; modelPath: string; cardPath: string }[];
    }>(`/sessions/${sessionId}/export`, {});
  }
}
