"""Steps 6-7: walk a full session to selection and provenance-rich export.

A session enforces the legal workflow transitions; the export writes one
model block plus one model card per selection.  Reloading the block
reproduces the in-memory model's predictions exactly, and the card records
everything needed to audit the result: spec, scores, split description,
pipeline, dataset metadata, and the user's preference rank.
"""
import json
import tempfile
from pathlib import Path

import numpy as np

from emabench import load_artifact, predict
from emabench.sampledata import auto_mpg
from emabench.workbench import Workbench

root = Path(tempfile.mkdtemp(prefix="emabench-demo-"))
bench = Workbench(root / "data", root / "exports")

csv_text, schema = auto_mpg()
bundle = bench.ingest(csv_text, schema)
spec = next(
    s for s in bench.problems(bundle.id) if s.target == "mpg" and s.metric == "mse"
)

search_id = bench.submit_search(spec.id, budget=6, top_k=6, seed=5)
bench.wait_search(search_id)
candidates = bench.candidates(search_id)

session = bench.create_session(bundle.id)
sid = session.id
for event, extra in (
    ("exploreProblems", {}),
    ("specifyProblem", {"spec_id": spec.id}),
    ("startSearch", {"search_id": search_id}),
    ("exploreModels", {}),
    ("selectModels", {}),
):
    state = bench.advance_session(sid, event, **extra)
    print(f"session -> step {int(state.step)} ({state.step.name})")

# the second-ranked model spreads residuals more evenly; prefer it anyway
picks = [candidates[1], candidates[0]]
bench.select_candidates(sid, [c.id for c in picks], [1, 2])
state = bench.advance_session(sid, "exportModels")
artifacts = bench.export_session(sid)

print(f"\nexported {len(artifacts)} artifacts to {root / 'exports'}:")
for a in artifacts:
    print(f"  rank {a.user_rank}: {Path(a.model_path).name}")

model, card = load_artifact(artifacts[0].model_path)
holdout = bundle.records(list(picks[0].split.holdout_row_ids))
identical = np.array_equal(predict(model, holdout), predict(picks[0].model, holdout))
print(f"\nreloaded model reproduces predictions bit-exactly: {identical}")

print("\nmodel card highlights:")
print(f"  pipeline: {card['pipeline']['family']} {card['pipeline']['hyperparameters']}")
print(f"  split: {json.dumps(card['split'], sort_keys=True)}")
print(f"  scores: mse={card['scores']['mse']:.3f} mae={card['scores']['mae']:.3f}")
print(f"  dataset: {card['dataset']['name']} ({card['dataset']['rowCount']} rows)")

state = bench.advance_session(sid, "retryProblem")
print(f"\nafter export the analyst may loop: session back at step {int(state.step)}")
