/** Problem-spec browser: the generated list plus a refine/create editor.
 * Server-side validation failures surface their named violations inline;
 * the metric dropdown only ever offers metrics valid for the task.
 */

import { ApiError, GatewayClient } from "./api.js";
import { METRICS_BY_TASK, type ProblemSpec } from "./types.js";

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

function provenanceBadge(spec: ProblemSpec): HTMLElement {
  const kind = spec.provenance.startsWith("refinedFrom:")
    ? "refined"
    : spec.provenance;
  return el("span", `badge badge-${kind}`, kind);
}

export interface SpecBrowserHooks {
  onPick?: (spec: ProblemSpec) => void;
  onRefined?: (spec: ProblemSpec) => void;
}

export function renderSpecList(
  container: HTMLElement,
  specs: ProblemSpec[],
  hooks: SpecBrowserHooks = {},
): void {
  container.replaceChildren();
  const list = el("ul", "spec-list");
  for (const spec of specs) {
    const item = el("li", "spec-item");
    item.dataset.specId = spec.id;
    item.appendChild(
      el("span", "spec-line", `${spec.taskType} ${spec.target} by ${spec.metric}`),
    );
    item.appendChild(provenanceBadge(spec));
    if (hooks.onPick) {
      item.addEventListener("click", () => hooks.onPick!(spec));
    }
    list.appendChild(item);
  }
  container.appendChild(list);
}

/** Refine editor: checkbox per feature to drop, metric dropdown, submit. */
export function renderRefineEditor(
  container: HTMLElement,
  spec: ProblemSpec,
  client: GatewayClient,
  hooks: SpecBrowserHooks = {},
): void {
  container.replaceChildren();
  const form = el("div", "refine-editor");
  form.dataset.specId = spec.id;
  form.appendChild(el("h3", "card-title", `refine: predict ${spec.target}`));

  const boxes: { feature: string; box: HTMLInputElement }[] = [];
  const features = el("div", "feature-list");
  for (const feature of spec.features) {
    const label = el("label", "feature");
    const box = el("input") as HTMLInputElement;
    box.type = "checkbox";
    box.checked = true; // checked = keep this feature
    box.dataset.feature = feature;
    label.appendChild(box);
    label.appendChild(el("span", undefined, feature));
    features.appendChild(label);
    boxes.push({ feature, box });
  }
  form.appendChild(features);

  const metric = el("select", "metric-select") as HTMLSelectElement;
  for (const m of METRICS_BY_TASK[spec.taskType]) {
    const option = el("option", undefined, m) as HTMLOptionElement;
    option.value = m;
    if (m === spec.metric) option.selected = true;
    metric.appendChild(option);
  }
  form.appendChild(metric);

  const violations = el("div", "violations");
  const submit = el("button", "submit-refine", "apply refinement") as HTMLButtonElement;

  const syncValidity = () => {
    const kept = boxes.filter(({ box }) => box.checked);
    if (kept.length === 0) {
      submit.disabled = true;
      violations.textContent = "emptyFeatures: a spec needs at least one feature";
    } else {
      submit.disabled = false;
      violations.textContent = "";
    }
  };
  for (const { box } of boxes) box.addEventListener("change", syncValidity);
  syncValidity();

  submit.addEventListener("click", () => {
    const removeFeatures = boxes
      .filter(({ box }) => !box.checked)
      .map(({ feature }) => feature);
    const setMetric = metric.value === spec.metric ? undefined : metric.value;
    void client
      .refineSpec(spec.id, removeFeatures, setMetric)
      .then((refined) => {
        violations.textContent = "";
        hooks.onRefined?.(refined);
      })
      .catch((err: unknown) => {
        if (err instanceof ApiError && err.code === "SPEC_INVALID") {
          const named = (err.details.violations as string[]) ?? [];
          violations.textContent = named.join(", ");
        } else {
          violations.textContent = String(err);
        }
      });
  });
  form.appendChild(violations);
  form.appendChild(submit);
  container.appendChild(form);
}
