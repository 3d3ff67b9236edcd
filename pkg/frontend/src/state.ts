/** Client view state: the cross-link selection and workflow mirror.
 *
 * The selected rowId set is the single source of truth for highlighting;
 * every view (histogram card, raw table, confusion cell, residual bar)
 * writes and reads the same set, which is what makes cross-linking
 * symmetric.  The set is always clipped to the dataset's rowIds.
 */

export type SelectionListener = (rows: ReadonlySet<number>, source: string) => void;

export class ViewState {
  private rowCount = 0;
  private selected = new Set<number>();
  private listeners: SelectionListener[] = [];

  activeStep = 1;
  comparison: string[] = []; // candidate ids compared side by side

  setDataset(rowCount: number): void {
    this.rowCount = rowCount;
    this.selected = new Set();
    this.emit("dataset");
  }

  get selectedRows(): ReadonlySet<number> {
    return this.selected;
  }

  /** Replace the selection; ids outside the dataset are dropped. */
  select(rowIds: Iterable<number>, source: string): void {
    const next = new Set<number>();
    for (const id of rowIds) {
      if (Number.isInteger(id) && id >= 0 && id < this.rowCount) next.add(id);
    }
    this.selected = next;
    this.emit(source);
  }

  clearSelection(source = "clear"): void {
    this.selected = new Set();
    this.emit(source);
  }

  mirrorStep(step: number): void {
    this.activeStep = step;
  }

  toggleComparison(candidateId: string): void {
    const at = this.comparison.indexOf(candidateId);
    if (at >= 0) this.comparison.splice(at, 1);
    else this.comparison.push(candidateId);
  }

  onSelection(listener: SelectionListener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(source: string): void {
    for (const listener of this.listeners) listener(this.selected, source);
  }
}
