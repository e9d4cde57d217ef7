"""Severity grading and the three prompt designs.

A classifier hands us five disease probabilities; the bridge turns them
into text an LLM can use. Run: python demos/01_grading_and_prompts.py
"""

from radbridge import (
    CaseRecord,
    DiagnosisScores,
    PromptDesign,
    SegmentationSummary,
    compose_query,
    grade_of,
    render_p1,
    render_p2,
    render_p3,
)

scores = DiagnosisScores(
    cardiomegaly=0.87,
    edema=0.12,
    consolidation=0.62,
    atelectasis=0.40,
    pleural_effusion=0.91,
)

print("## Severity grades")
for obs, value in scores.items():
    print(f"  {obs.display_name:<18} {value:.2f} -> {grade_of(value).phrase}")

print("\n## Prompt design 1: raw scores")
print(render_p1(scores))

print("\n## Prompt design 2: severity phrasing")
print(render_p2(scores))

print("\n## Prompt design 3: concise, threshold 0.5")
print(render_p3(scores))

print("\n## Prompt design 3 on a quiet exam")
print(render_p3(DiagnosisScores(0.1, 0.2, 0.3, 0.1, 0.4)))

# The full query bundles every available network output plus an instruction.
case = CaseRecord(
    case_id="demo-1",
    draft_report="The heart size is normal. The lungs are clear.",
    scores=scores,
    segmentation=(
        SegmentationSummary("left lower lobe", 0.25, "consolidation"),
    ),
)
print("\n## Composed query (P3 + segmentation + draft)")
print(compose_query(case, PromptDesign.P3).full_text)

print("\n## Same query with mention suppression")
print(compose_query(case, PromptDesign.P3, suppress_mention=True).instruction)
