/** Workflow panel: the seven-step indicator plus action buttons.
 *
 * Enabled actions are exactly the server's legal transitions for the
 * current step; the client holds no legality rules of its own.  While a
 * search runs, a progress bar reflects the polled SearchStatus counts.
 */

import type { SearchStatus, SessionState } from "./types.js";
import { WORKFLOW_STEPS } from "./types.js";

const EVENT_LABELS: Record<string, string> = {
  exploreProblems: "Explore problems",
  backToData: "Back to data",
  specifyProblem: "Specify problem",
  startSearch: "Start model search",
  exploreModels: "Explore models",
  selectModels: "Select models",
  exportModels: "Export models",
  retryProblem: "Return to step 3",
};

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

export function renderWorkflowPanel(
  container: HTMLElement,
  session: SessionState,
  searchStatus: SearchStatus | null,
  onAction: (event: string) => void,
): void {
  container.replaceChildren();
  const panel = el("div", "workflow-panel");

  const steps = el("ol", "steps");
  for (const { step, name, label } of WORKFLOW_STEPS) {
    const item = el("li", "step", `${step}. ${label}`);
    item.dataset.step = String(step);
    item.dataset.stepName = name;
    if (step === session.step) item.classList.add("active");
    if (step < session.step) item.classList.add("done");
    if (step === 7 && session.exports.length > 0) item.classList.add("complete");
    steps.appendChild(item);
  }
  panel.appendChild(steps);

  if (session.exports.length > 0) {
    const exports = el("ul", "export-links");
    for (const path of session.exports) {
      exports.appendChild(el("li", "export-link", path));
    }
    panel.appendChild(exports);
  }

  if (searchStatus && searchStatus.state !== "done") {
    const progress = el("div", "search-progress");
    progress.dataset.state = searchStatus.state;
    const fill = el("div", "progress-fill");
    const percent = searchStatus.total
      ? Math.round((searchStatus.evaluated / searchStatus.total) * 100)
      : 0;
    fill.style.width = `${percent}%`;
    progress.appendChild(fill);
    progress.appendChild(
      el(
        "span",
        "progress-text",
        `${searchStatus.evaluated}/${searchStatus.total} configurations`,
      ),
    );
    panel.appendChild(progress);
  }

  const actions = el("div", "actions");
  for (const event of session.legalEvents) {
    const button = el("button", "action", EVENT_LABELS[event] ?? event);
    button.dataset.event = event;
    button.addEventListener("click", () => onAction(event));
    actions.appendChild(button);
  }
  panel.appendChild(actions);
  container.appendChild(panel);
}
