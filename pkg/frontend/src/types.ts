/** Wire types mirroring the gateway's documented payloads. */

export interface ColumnSchema {
  name: string;
  kind: "categorical" | "numeric" | "datetime" | "key" | "reference";
  unit?: string;
}

export interface DatasetInfo {
  datasetId: string;
  rowCount: number;
  resourceShape: string;
  metadata: { name: string; description: string; source: string; season?: number };
  columns: ColumnSchema[];
}

export interface HistogramPayload {
  edges: number[];
  counts: number[];
}

export interface FrequencyEntry {
  label: string;
  count: number;
}

export interface ColumnCard {
  kind: string;
  missingCount: number;
  histogram?: HistogramPayload;
  frequencies?: FrequencyEntry[];
  span?: { min: string | null; max: string | null };
  count?: number;
  distinctCount?: number;
  min?: number | null;
  max?: number | null;
}

export interface DatasetSummary {
  datasetId: string;
  rowCount: number;
  binCount: number;
  columns: Record<string, ColumnCard>;
}

export type RowRecord = Record<string, string | number | null> & { rowId: number };

export interface RowsPage {
  rows: RowRecord[];
}

export type Selector =
  | { column: string; label: string }
  | { column: string; binIndex: number; binCount: number };

export interface ProblemSpec {
  id: string;
  datasetId: string;
  taskType: "classification" | "regression" | "forecasting" | "collaborativeFiltering";
  target: string;
  features: string[];
  metric: string;
  provenance: string;
}

export interface CandidateSummary {
  id: string;
  rank: number;
  family: string;
  hyperparameters: Record<string, unknown>;
  cvScore: number;
  scores: Record<string, number>;
}

export interface PerInstanceEntry {
  rowId: number;
  truth: string | number;
  prediction: string | number;
  residual?: number;
}

export interface ConfusionPayload {
  labels: string[];
  cells: number[][];
}

export interface EvalReport {
  candidateId: string;
  task: string;
  perInstance: PerInstanceEntry[];
  scores: Record<string, number>;
  confusion: ConfusionPayload | null;
  perClassScores: Record<string, { precision: number; recall: number; f1: number }> | null;
  flags: Record<string, unknown>;
}

export interface SearchStatus {
  state: "queued" | "running" | "done" | "failed";
  evaluated: number;
  total: number;
  error?: ApiErrorDoc;
}

export interface SessionState {
  id: string;
  datasetId: string;
  step: number;
  stepName: string;
  specIds: string[];
  activeSpecId: string | null;
  searchIds: string[];
  selections: { candidateId: string; userRank: number }[];
  exports: string[];
  eventLog: { seq: number; event: string; fromStep: number; toStep: number }[];
  legalEvents: string[];
}

export interface ApiErrorDoc {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

/** Metric validity per task, mirroring the server's closed table. */
export const METRICS_BY_TASK: Record<ProblemSpec["taskType"], string[]> = {
  classification: ["accuracy", "f1Macro", "precisionMacro", "recallMacro"],
  regression: ["mse", "rmse", "mae", "r2"],
  forecasting: ["rmse", "mae", "mape"],
  collaborativeFiltering: ["mse", "rmse", "mae", "r2"],
};

export const WORKFLOW_STEPS: { step: number; name: string; label: string }[] = [
  { step: 1, name: "dataExploration", label: "Data exploration" },
  { step: 2, name: "problemExploration", label: "Problem exploration" },
  { step: 3, name: "problemSpecification", label: "Problem specification" },
  { step: 4, name: "modelTraining", label: "Model training" },
  { step: 5, name: "modelExploration", label: "Model exploration" },
  { step: 6, name: "modelSelection", label: "Model selection" },
  { step: 7, name: "exportModels", label: "Export models" },
];
