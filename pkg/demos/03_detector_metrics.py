"""Detection-quality harness walkthrough.

Scores a pretend detector run against hand-labeled truth boxes:
greedy IoU matching with a 0.5 floor, then precision / recall /
accuracy / mean IoU.
"""

from nutrivision import Detection, GroundTruthBox, dedupe, evaluate, iou

truth = [
    GroundTruthBox("apple", 100, 100, 80, 80),
    GroundTruthBox("banana", 300, 120, 140, 60),
    GroundTruthBox("pizza", 150, 300, 200, 180),
]

raw_detections = [
    Detection("apple", 104, 98, 82, 84, confidence=0.91),    # good hit
    Detection("apple", 108, 102, 80, 80, confidence=0.62),   # duplicate of the same apple
    Detection("banana", 310, 125, 130, 58, confidence=0.84), # good hit
    Detection("donut", 500, 400, 60, 60, confidence=0.77),   # hallucination
]

print("pairwise IoU of the two apple boxes:",
      round(iou(raw_detections[0], raw_detections[1]), 3))

detections = dedupe(raw_detections)
print(f"dedupe keeps {len(detections)} of {len(raw_detections)} boxes")
print()

metrics = evaluate(detections, truth)
print(f"TP={metrics.tp} FP={metrics.fp} FN={metrics.fn}")
print(f"precision = {metrics.precision:.3f}")
print(f"recall    = {metrics.recall:.3f}")
print(f"accuracy  = {metrics.accuracy:.3f}   (per-box: TP / (TP+FP+FN))")
print(f"mean IoU  = {metrics.mean_iou:.3f}")
if metrics.undefined:
    print("undefined metrics reported as 0:", metrics.undefined)
