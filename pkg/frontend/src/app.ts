/** Single-page glue: wires the panels to a running gateway.
 *
 * Layout mirrors the workbench: workflow panel on the left, cards on the
 * right.  All state changes flow through gateway requests; the client owns
 * only the cross-link selection and view toggles.
 */

import { GatewayClient } from "./api.js";
import { renderDataCards } from "./datacards.js";
import { renderModelCards } from "./modelcards.js";
import { pollSearch } from "./poll.js";
import { renderRefineEditor, renderSpecList } from "./specbrowser.js";
import { ViewState } from "./state.js";
import { renderWorkflowPanel } from "./workflow.js";
import type {
  CandidateSummary,
  EvalReport,
  ProblemSpec,
  SearchStatus,
  SessionState,
} from "./types.js";

interface AppContext {
  client: GatewayClient;
  state: ViewState;
  datasetId: string | null;
  session: SessionState | null;
  specs: ProblemSpec[];
  activeSpec: ProblemSpec | null;
  searchId: string | null;
  searchStatus: SearchStatus | null;
  candidates: CandidateSummary[];
  reports: Map<string, EvalReport>;
  picks: string[];
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

export async function boot(baseUrl = ""): Promise<void> {
  const ctx: AppContext = {
    client: new GatewayClient(baseUrl),
    state: new ViewState(),
    datasetId: null,
    session: null,
    specs: [],
    activeSpec: null,
    searchId: null,
    searchStatus: null,
    candidates: [],
    reports: new Map(),
    picks: [],
  };

  const { datasetIds } = await ctx.client.listDatasets();
  const picker = byId("dataset-picker") as unknown as HTMLSelectElement;
  picker.replaceChildren();
  for (const id of datasetIds) {
    const option = document.createElement("option");
    option.value = id;
    option.textContent = id;
    picker.appendChild(option);
  }
  picker.addEventListener("change", () => void openDataset(ctx, picker.value));
  if (datasetIds.length) await openDataset(ctx, datasetIds[0]);
}

async function openDataset(ctx: AppContext, datasetId: string): Promise<void> {
  ctx.datasetId = datasetId;
  const info = await ctx.client.dataset(datasetId);
  ctx.state.setDataset(info.rowCount);
  ctx.session = await ctx.client.createSession(datasetId);
  ctx.state.mirrorStep(ctx.session.step);

  const [summary, page] = await Promise.all([
    ctx.client.summary(datasetId),
    ctx.client.rows(datasetId, 0, 200),
  ]);
  renderDataCards(byId("data-cards"), summary, page.rows, ctx.client, ctx.state);
  redrawWorkflow(ctx);
}

function redrawWorkflow(ctx: AppContext): void {
  if (!ctx.session) return;
  ctx.state.mirrorStep(ctx.session.step);
  renderWorkflowPanel(
    byId("workflow"),
    ctx.session,
    ctx.searchStatus,
    (event) => void handleAction(ctx, event),
  );
}

async function handleAction(ctx: AppContext, event: string): Promise<void> {
  if (!ctx.session || !ctx.datasetId) return;
  const client = ctx.client;
  const sid = ctx.session.id;

  if (event === "exploreProblems") {
    ctx.session = await client.advance(sid, event);
    const { specs } = await client.problems(ctx.datasetId);
    ctx.specs = specs;
    renderSpecList(byId("spec-browser"), specs, {
      onPick: (spec) => {
        ctx.activeSpec = spec;
        renderRefineEditor(byId("spec-editor"), spec, client, {
          onRefined: (refined) => {
            ctx.activeSpec = refined;
            renderSpecList(byId("spec-browser"), [...ctx.specs, refined], {});
          },
        });
      },
    });
  } else if (event === "specifyProblem") {
    if (!ctx.activeSpec) return;
    ctx.session = await client.advance(sid, event, { specId: ctx.activeSpec.id });
  } else if (event === "startSearch") {
    if (!ctx.activeSpec) return;
    const { searchId } = await client.submitSearch({
      specId: ctx.activeSpec.id,
      budget: 16,
      topK: 6,
    });
    ctx.searchId = searchId;
    ctx.session = await client.advance(sid, event, { searchId });
    await pollSearch(client, searchId, (status) => {
      ctx.searchStatus = status;
      redrawWorkflow(ctx);
    });
  } else if (event === "exploreModels") {
    ctx.session = await client.advance(sid, event);
    if (ctx.searchId) {
      const { candidates } = await client.candidates(ctx.searchId);
      ctx.candidates = candidates;
      ctx.reports = new Map();
      for (const candidate of candidates) {
        ctx.reports.set(candidate.id, await client.report(candidate.id));
      }
      renderModelCards(
        byId("model-cards"),
        candidates,
        ctx.reports,
        ctx.state,
        [],
        {
          onToggleCompare: (id) => ctx.state.toggleComparison(id),
          onSelectForExport: (id) => {
            if (!ctx.picks.includes(id)) ctx.picks.push(id);
          },
        },
      );
    }
  } else if (event === "selectModels") {
    ctx.session = await client.advance(sid, event);
    if (ctx.picks.length) {
      ctx.session = await client.select(
        sid,
        ctx.picks,
        ctx.picks.map((_, i) => i + 1),
      );
    }
  } else if (event === "exportModels") {
    ctx.session = await client.advance(sid, event);
    await client.exportSelected(sid);
    ctx.session = await client.session(sid);
  } else {
    ctx.session = await client.advance(sid, event);
  }
  redrawWorkflow(ctx);
}
