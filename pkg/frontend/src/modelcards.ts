/** Model exploration cards: ranked candidate list plus per-candidate
 * prediction artifacts.
 *
 * Everything rendered is taken verbatim from server payloads: the ranked
 * order is the server's, confusion cell counts are the report's numbers,
 * residual bars carry the report's residuals.  Clicking a confusion cell
 * or a residual bar pushes the underlying perInstance rowIds into the
 * shared selection, which highlights the same rows in every data card.
 */

import type { ViewState } from "./state.js";
import type {
  CandidateSummary,
  ConfusionPayload,
  EvalReport,
  PerInstanceEntry,
} from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function formatScore(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(4);
}

/** rowIds of holdout instances with the given (truth, prediction) pair. */
export function cellRowIds(
  perInstance: PerInstanceEntry[],
  truth: string | number,
  prediction: string | number,
): number[] {
  return perInstance
    .filter((e) => e.truth === truth && e.prediction === prediction)
    .map((e) => e.rowId);
}

function heat(count: number, denominator: number): string {
  if (denominator <= 0) return "rgba(30, 90, 160, 0)";
  const alpha = Math.min(count / denominator, 1);
  return `rgba(30, 90, 160, ${alpha.toFixed(3)})`;
}

export function renderConfusionMatrix(
  report: EvalReport,
  state: ViewState,
  rowNormalized = false,
): HTMLElement {
  const confusion = report.confusion as ConfusionPayload;
  const wrap = el("div", "confusion");
  const toggle = el("button", "normalize-toggle", "row-normalize colors");
  const table = el("table", "confusion-matrix");

  const draw = (normalized: boolean) => {
    table.replaceChildren();
    const head = el("tr");
    head.appendChild(el("th", undefined, "truth \\ predicted"));
    for (const label of confusion.labels) {
      head.appendChild(el("th", undefined, String(label)));
    }
    table.appendChild(head);
    const globalMax = Math.max(...confusion.cells.flat());
    confusion.cells.forEach((row, i) => {
      const tr = el("tr");
      tr.appendChild(el("th", undefined, String(confusion.labels[i])));
      const rowSum = row.reduce((a, b) => a + b, 0);
      row.forEach((count, j) => {
        // the display number is always the payload count; normalization
        // only changes the shading denominator
        const td = el("td", "cell", String(count));
        td.dataset.truth = String(confusion.labels[i]);
        td.dataset.predicted = String(confusion.labels[j]);
        td.style.backgroundColor = heat(count, normalized ? rowSum : globalMax);
        td.addEventListener("click", () => {
          state.select(
            cellRowIds(report.perInstance, confusion.labels[i], confusion.labels[j]),
            `confusion:${report.candidateId}`,
          );
        });
        tr.appendChild(td);
      });
      table.appendChild(tr);
    });
  };

  let normalized = rowNormalized;
  draw(normalized);
  toggle.addEventListener("click", () => {
    normalized = !normalized;
    draw(normalized);
  });
  wrap.appendChild(toggle);
  wrap.appendChild(table);
  return wrap;
}

export type ResidualOrder = "magnitude" | "rowId";

export function renderResidualChart(
  report: EvalReport,
  state: ViewState,
  initialOrder: ResidualOrder = "magnitude",
): HTMLElement {
  const wrap = el("div", "residuals");
  const toggle = el("button", "order-toggle");
  const chart = el("div", "residual-chart");
  const entries = report.perInstance.filter((e) => e.residual !== undefined);
  const maxAbs = Math.max(...entries.map((e) => Math.abs(e.residual as number)), 1e-12);

  let order: ResidualOrder = initialOrder;

  const draw = () => {
    toggle.textContent = `sorted by ${order === "magnitude" ? "|residual|" : "rowId"}`;
    chart.replaceChildren();
    const view = [...entries];
    if (order === "magnitude") {
      view.sort(
        (a, b) => Math.abs(b.residual as number) - Math.abs(a.residual as number),
      );
    } else {
      view.sort((a, b) => a.rowId - b.rowId);
    }
    for (const entry of view) {
      const residual = entry.residual as number;
      const bar = el("div", residual >= 0 ? "rbar positive" : "rbar negative");
      bar.dataset.rowId = String(entry.rowId);
      bar.dataset.residual = String(residual);
      bar.style.height = `${Math.round((Math.abs(residual) / maxAbs) * 100)}%`;
      bar.title = `row ${entry.rowId}: residual ${residual}`;
      bar.addEventListener("click", () =>
        state.select([entry.rowId], `residual:${report.candidateId}`),
      );
      chart.appendChild(bar);
    }
  };

  toggle.addEventListener("click", () => {
    order = order === "magnitude" ? "rowId" : "magnitude";
    draw();
  });
  draw();
  wrap.appendChild(toggle);
  wrap.appendChild(chart);
  return wrap;
}

/** Observed values drawn solid; predicted tail drawn dotted. */
export function renderForecastOverlay(
  report: EvalReport,
  observed: { rowId: number; value: number }[],
): HTMLElement {
  const wrap = el("div", "forecast");
  const svgNS = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(svgNS, "svg");
  svg.setAttribute("viewBox", "0 0 600 200");
  svg.setAttribute("class", "forecast-svg");

  const predicted = report.perInstance.map((e) => ({
    rowId: e.rowId,
    value: e.prediction as number,
  }));
  const everything = [
    ...observed.map((p) => p.value),
    ...predicted.map((p) => p.value),
  ];
  const lo = Math.min(...everything);
  const hi = Math.max(...everything);
  const lastRow = Math.max(
    ...observed.map((p) => p.rowId),
    ...predicted.map((p) => p.rowId),
  );
  const x = (rowId: number) => (rowId / Math.max(lastRow, 1)) * 600;
  const y = (value: number) =>
    hi === lo ? 100 : 200 - ((value - lo) / (hi - lo)) * 200;
  const points = (series: { rowId: number; value: number }[]) =>
    series.map((p) => `${x(p.rowId).toFixed(1)},${y(p.value).toFixed(1)}`).join(" ");

  const solid = document.createElementNS(svgNS, "polyline");
  solid.setAttribute("class", "observed-line");
  solid.setAttribute("fill", "none");
  solid.setAttribute("points", points(observed));

  const dotted = document.createElementNS(svgNS, "polyline");
  dotted.setAttribute("class", "predicted-line");
  dotted.setAttribute("fill", "none");
  dotted.setAttribute("stroke-dasharray", "4 4");
  dotted.setAttribute("points", points(predicted));

  svg.appendChild(solid);
  svg.appendChild(dotted);
  wrap.appendChild(svg);
  return wrap;
}

export interface ModelCardHooks {
  onToggleCompare?: (candidateId: string) => void;
  onSelectForExport?: (candidateId: string) => void;
}

export function renderModelCard(
  candidate: CandidateSummary,
  report: EvalReport | null,
  state: ViewState,
  observed: { rowId: number; value: number }[] = [],
  hooks: ModelCardHooks = {},
): HTMLElement {
  const card = el("div", "card model-card");
  card.dataset.candidateId = candidate.id;
  card.dataset.rank = String(candidate.rank);

  const title = el(
    "h3",
    "card-title",
    `#${candidate.rank} ${candidate.family}`,
  );
  card.appendChild(title);
  card.appendChild(
    el("div", "hyperparameters", JSON.stringify(candidate.hyperparameters)),
  );

  const scoreList = el("ul", "scores");
  for (const [metric, value] of Object.entries(candidate.scores)) {
    const item = el("li", "score", `${metric}: ${formatScore(value)}`);
    item.dataset.metric = metric;
    item.dataset.value = String(value);
    scoreList.appendChild(item);
  }
  card.appendChild(scoreList);

  if (report === null) {
    card.appendChild(el("div", "card-error", "report unavailable"));
    return card;
  }
  if (report.confusion) {
    card.appendChild(renderConfusionMatrix(report, state));
  } else if (report.task === "forecasting") {
    card.appendChild(renderForecastOverlay(report, observed));
  } else {
    card.appendChild(renderResidualChart(report, state));
  }

  if (hooks.onToggleCompare) {
    const compare = el("button", "compare-toggle", "compare");
    compare.addEventListener("click", () => hooks.onToggleCompare!(candidate.id));
    card.appendChild(compare);
  }
  if (hooks.onSelectForExport) {
    const pick = el("button", "pick", "select for export");
    pick.addEventListener("click", () => hooks.onSelectForExport!(candidate.id));
    card.appendChild(pick);
  }
  return card;
}

/** Ranked list (server order, never re-sorted) with a show-more pager. */
export function renderModelCards(
  container: HTMLElement,
  candidates: CandidateSummary[],
  reports: Map<string, EvalReport>,
  state: ViewState,
  observed: { rowId: number; value: number }[] = [],
  hooks: ModelCardHooks = {},
  initiallyShown = 3,
): void {
  container.replaceChildren();
  const list = el("div", "model-list");
  let shown = Math.min(initiallyShown, candidates.length);

  const draw = () => {
    list.replaceChildren();
    for (const candidate of candidates.slice(0, shown)) {
      list.appendChild(
        renderModelCard(
          candidate,
          reports.get(candidate.id) ?? null,
          state,
          observed,
          hooks,
        ),
      );
    }
  };
  draw();
  container.appendChild(list);
  if (shown < candidates.length) {
    const more = el("button", "show-more", "show more");
    more.addEventListener("click", () => {
      shown = candidates.length;
      draw();
      more.remove();
    });
    container.appendChild(more);
  }
}

/** Side-by-side comparison of two or more candidates. */
export function renderComparison(
  container: HTMLElement,
  picked: CandidateSummary[],
  reports: Map<string, EvalReport>,
  state: ViewState,
): void {
  container.replaceChildren();
  const row = el("div", "comparison-row");
  for (const candidate of picked) {
    row.appendChild(
      renderModelCard(candidate, reports.get(candidate.id) ?? null, state),
    );
  }
  container.appendChild(row);
}
