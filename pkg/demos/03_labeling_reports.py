"""Rule-based label extraction from free-text reports.

Lexicon phrases anchor each observation; negation/uncertainty cues within a
six-token window before the phrase flip its status. Run:
python demos/03_labeling_reports.py
"""

from radbridge import UncertainPolicy, binarize, label_report

REPORTS = [
    "There is no pleural effusion.",
    "Possible consolidation in the left lower lobe. Small bilateral pleural effusions.",
    "Moderate cardiomegaly with pulmonary edema.",
    "No evidence of consolidation, effusion, or edema.",
    "Likely atelectasis at the left base.",
    "The lungs are clear. No acute cardiopulmonary process.",
]

for text in REPORTS:
    labels = label_report(text)
    print(f"report: {text}")
    for obs, status in labels.items():
        if status.value != "NotMentioned":
            print(f"   {obs.display_name:<18} {status.value}")
    print(f"   noFinding={labels.no_finding}")
    print(f"   binarized (uncertain->positive): {binarize(labels, UncertainPolicy.AS_POSITIVE)}")
    print()
