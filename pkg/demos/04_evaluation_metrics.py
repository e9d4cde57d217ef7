"""Precision/recall/F1 machinery, length statistics, and BLEU.

Run: python demos/04_evaluation_metrics.py
"""

import random

from radbridge import PromptDesign, RefinedReport, bleu4, confusion, length_stats, prf1
from radbridge.evaluation import EvalMetadata, assemble_report, format_table

rng = random.Random(7)

# Toy multi-label predictions vs truth: five observations per case.
truth = [tuple(rng.random() < 0.4 for _ in range(5)) for _ in range(40)]
pred = [
    tuple((t if rng.random() < 0.8 else not t) for t in case)  # 80% faithful
    for case in truth
]

result = prf1(confusion(pred, truth))
print("## Per-observation metrics (noisy predictor)")
for obs, triple in result.per_observation.items():
    print(f"  {obs.display_name:<18} P={triple.precision:.3f} R={triple.recall:.3f} F1={triple.f1:.3f}")
print(f"  macro F1 = {result.macro.f1:.3f}")

reports = [
    RefinedReport(
        case_id=f"c{i}",
        text=" ".join(["finding"] * rng.randint(0, 150)) or "n/a",
        prompt_design=PromptDesign.P3,
        backend_id="demo",
        raw_response="",
    )
    for i in range(40)
]
stats = length_stats(reports)
print("\n## Report length histogram (word-count buckets)")
print(f"  boundaries: {stats.boundaries}")
print(f"  counts:     {stats.counts}")
print(f"  emptyReportFraction: {stats.empty_report_fraction:.3f}")

print("\n## BLEU-4")
print("  identical:     ", bleu4("the cat sat", ["the cat sat"]))
print("  short overlap: ", round(bleu4("the cat sat", ["the cat sat down"]), 4))
print("  disjoint:      ", bleu4("alpha beta", ["gamma delta"]))

print("\n## Assembled evaluation report")
report = assemble_report(pred, truth, reports, EvalMetadata("P3", "demo", "AsPositive", 7))
print(format_table(report))
