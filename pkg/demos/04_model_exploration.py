"""Step 5: explore candidates through their holdout predictions.

Classification candidates come with interactive confusion matrices (drawn
here as text); clicking a cell yields the underlying rowIds so data views
can highlight them.  Numeric tasks get residual charts, and forecasts an
observed/predicted overlay.
"""
from emabench import SearchRequest, enumerate_specs, ingest, refine_spec, run_search
from emabench.sampledata import monthly_series, popular_kids

csv_text, schema = popular_kids()
kids = ingest(csv_text, schema)
goal = next(
    s for s in enumerate_specs(kids) if s.target == "Goal" and s.metric == "accuracy"
)
goal = refine_spec(kids, goal, remove_features=["School", "District"])
candidates = run_search(
    SearchRequest(spec_id=goal.id, budget=13, top_k=3, seed=11), kids, goal
)

print("=== confusion matrices (rows = truth, columns = predicted) ===")
for cand in candidates:
    cm = cand.holdout_report.confusion
    acc = cand.holdout_report.scores["accuracy"]
    print(f"\n#{cand.rank} {cand.descriptor.family} (accuracy {acc:.3f})")
    print(" " * 10 + "".join(f"{l:>9}" for l in cm.labels))
    for label, row in zip(cm.labels, cm.cells):
        print(f"{label:>10}" + "".join(f"{v:>9}" for v in row))

best = candidates[0]
cell_rows = [
    e["rowId"]
    for e in best.holdout_report.per_instance
    if e["truth"] == "Grades" and e["prediction"] == "Sports"
]
print(f"\nclicking cell (truth=Grades, pred=Sports) selects rows {cell_rows[:10]}")
print("those rowIds drive highlights in every cross-linked data card")

per_class = best.holdout_report.per_class
print("\nper-class scores of the top model:")
for label, row in per_class.items():
    print(
        f"  {label:<8} precision={row['precision']:.3f} "
        f"recall={row['recall']:.3f} f1={row['f1']:.3f}"
    )

print("\n=== forecast overlay (solid = observed, dotted = predicted) ===")
csv_text, schema = monthly_series()
series = ingest(csv_text, schema)
fc = next(
    s for s in enumerate_specs(series) if s.task.value == "forecasting" and s.metric == "rmse"
)
forecasts = run_search(SearchRequest(spec_id=fc.id, budget=6, top_k=3, seed=2), series, fc)
top = forecasts[0]
print(f"top forecaster: {top.descriptor.family} {top.descriptor.hyperparameters}")
for entry in top.holdout_report.per_instance[:6]:
    bar = "#" * int(max(entry["truth"] - 100, 0) / 2)
    print(
        f"  t={entry['rowId']:>3} observed={entry['truth']:>8.2f} "
        f"predicted={entry['prediction']:>8.2f}  {bar}"
    )
print(f"holdout rmse: {top.holdout_report.scores['rmse']:.3f}")
