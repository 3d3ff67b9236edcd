"""Steps 2-3: browse the auto-generated problem specs, refine one, and
write one from scratch.

The generator proposes one spec per (eligible target, task, metric); a
user then narrows the feature list or swaps the metric, and every edit is
re-validated with named violations.
"""
from emabench import create_spec, enumerate_specs, ingest, refine_spec
from emabench.errors import SpecInvalidError
from emabench.sampledata import popular_kids

csv_text, schema = popular_kids()
bundle = ingest(csv_text, schema)

specs = enumerate_specs(bundle)
print(f"{len(specs)} generated problem specifications")
for s in specs[:6]:
    print(f"  {s.id}  {s.task.value:<16} target={s.target:<12} metric={s.metric}")
print("  ...")
print()

goal = next(s for s in specs if s.target == "Goal" and s.metric == "accuracy")
print(f"chosen: predict {goal.target} [{goal.task.value}/{goal.metric}]")
print(f"  default features: {', '.join(goal.features)}")

# school identity would not transfer to deployment; drop those columns
refined = refine_spec(bundle, goal, remove_features=["School", "District"])
print(f"refined ({refined.provenance}):")
print(f"  features now: {', '.join(refined.features)}")
print()

custom = create_spec(
    bundle,
    {
        "datasetId": bundle.id,
        "taskType": "regression",
        "target": "GradesScore",
        "metric": "mae",
        "features": ["Gender", "Grade", "Age", "SportsScore"],
    },
)
print(f"user-created spec {custom.id}: predict {custom.target} by {custom.metric}")

try:
    create_spec(
        bundle,
        {
            "datasetId": bundle.id,
            "taskType": "regression",
            "target": "Goal",
            "metric": "mse",
            "features": ["Age"],
        },
    )
except SpecInvalidError as err:
    print(f"invalid draft rejected with named violations: {err.violations}")
