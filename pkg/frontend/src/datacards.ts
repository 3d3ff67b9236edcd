/** Data exploration cards: one histogram / frequency card per column plus
 * the searchable, sortable raw table.  Brushing a bar asks the server for
 * the matching rowIds (never recomputed locally) and pushes them into the
 * shared selection.
 */

import type { GatewayClient } from "./api.js";
import type { ViewState } from "./state.js";
import type { ColumnCard, DatasetSummary, RowRecord, Selector } from "./types.js";

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

function barHeight(count: number, maxCount: number): string {
  if (maxCount <= 0) return "0%";
  return `${Math.round((count / maxCount) * 100)}%`;
}

function renderHistogramCard(
  name: string,
  card: ColumnCard,
  binCount: number,
  onBrush: (selector: Selector) => void,
): HTMLElement {
  const root = el("div", "card data-card");
  root.dataset.column = name;
  root.appendChild(el("h3", "card-title", `${name} (${card.kind})`));
  const bars = el("div", "histogram");
  if (card.histogram) {
    const maxCount = Math.max(...card.histogram.counts);
    card.histogram.counts.forEach((count, bin) => {
      const bar = el("div", "bar");
      bar.dataset.bin = String(bin);
      bar.dataset.count = String(count);
      bar.style.height = barHeight(count, maxCount);
      bar.title = `${count} rows`;
      bar.addEventListener("click", () =>
        onBrush({ column: name, binIndex: bin, binCount }),
      );
      bars.appendChild(bar);
    });
  } else if (card.frequencies) {
    const maxCount = Math.max(...card.frequencies.map((f) => f.count));
    for (const entry of card.frequencies) {
      const bar = el("div", "bar labeled");
      bar.dataset.label = entry.label;
      bar.dataset.count = String(entry.count);
      bar.style.height = barHeight(entry.count, maxCount);
      bar.title = `${entry.label}: ${entry.count}`;
      bar.addEventListener("click", () =>
        onBrush({ column: name, label: entry.label }),
      );
      bar.appendChild(el("span", "bar-label", entry.label));
      bars.appendChild(bar);
    }
  }
  root.appendChild(bars);
  if (card.missingCount > 0) {
    root.appendChild(el("div", "missing-note", `${card.missingCount} missing`));
  }
  return root;
}

function cellText(value: string | number | null): string {
  return value === null ? "" : String(value);
}

export interface DataCardsHandle {
  /** rowIds currently visible in the table (after search + selection filter) */
  visibleRows(): number[];
}

export function renderDataCards(
  container: HTMLElement,
  summary: DatasetSummary,
  page: RowRecord[],
  client: GatewayClient,
  state: ViewState,
): DataCardsHandle {
  container.replaceChildren();
  const cards = el("div", "cards");

  const brush = (selector: Selector) => {
    void client
      .rowsMatching(summary.datasetId, selector)
      .then(({ rowIds }) => state.select(rowIds, `card:${selector.column}`));
  };

  for (const [name, card] of Object.entries(summary.columns)) {
    if (card.histogram || card.frequencies) {
      cards.appendChild(renderHistogramCard(name, card, summary.binCount, brush));
    }
  }
  const clear = el("button", "clear-brush", "Clear selection");
  clear.addEventListener("click", () => state.clearSelection());
  cards.appendChild(clear);
  container.appendChild(cards);

  // raw table: searchable, sortable, cross-link highlighted
  const tableWrap = el("div", "table-wrap");
  const search = el("input", "table-search") as HTMLInputElement;
  search.placeholder = "search rows";
  tableWrap.appendChild(search);
  const table = el("table", "raw-table");
  const columns = page.length
    ? Object.keys(page[0]).filter((c) => c !== "rowId")
    : [];
  const head = el("thead");
  const headRow = el("tr");
  headRow.appendChild(el("th", undefined, "#"));
  for (const column of columns) {
    const th = el("th", "sortable", column);
    th.addEventListener("click", () => {
      sortKey = sortKey === column ? null : column;
      redraw();
    });
    headRow.appendChild(th);
  }
  head.appendChild(headRow);
  table.appendChild(head);
  const body = el("tbody");
  table.appendChild(body);
  tableWrap.appendChild(table);
  container.appendChild(tableWrap);

  let sortKey: string | null = null;
  let query = "";

  function orderedRows(): RowRecord[] {
    let rows = [...page];
    if (query) {
      const q = query.toLowerCase();
      rows = rows.filter((r) =>
        columns.some((c) => cellText(r[c]).toLowerCase().includes(q)),
      );
    }
    if (sortKey !== null) {
      const key = sortKey;
      rows.sort((a, b) => {
        const va = a[key];
        const vb = b[key];
        if (typeof va === "number" && typeof vb === "number") return va - vb;
        return cellText(va).localeCompare(cellText(vb));
      });
    }
    return rows;
  }

  function redraw(): void {
    const selection = state.selectedRows;
    body.replaceChildren();
    for (const row of orderedRows()) {
      if (selection.size > 0 && !selection.has(row.rowId)) continue;
      const tr = el("tr");
      tr.dataset.rowId = String(row.rowId);
      if (selection.size > 0) tr.classList.add("highlighted");
      tr.appendChild(el("td", undefined, String(row.rowId)));
      for (const column of columns) {
        tr.appendChild(el("td", undefined, cellText(row[column])));
      }
      body.appendChild(tr);
    }
  }

  search.addEventListener("input", () => {
    query = search.value;
    redraw();
  });
  state.onSelection(() => redraw());
  redraw();

  return {
    visibleRows: () =>
      Array.from(body.querySelectorAll("tr")).map((tr) =>
        Number(tr.dataset.rowId),
      ),
  };
}
