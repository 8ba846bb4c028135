"""Regenerates the small hand-shaped fixtures under tests/data."""
import json
import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))

# Fixed per-seed multiplicative wiggles so the data is noisy but reproducible.
WIGGLE = [1.000, 1.004, 0.997, 1.002, 0.995]


def ar32(layers):
    return layers, 32 * layers


def value(params, alpha, c):
    return round(c * (params / 12288) ** alpha, 6)


def rows(task, family, metric, alpha, c, seeds, direction="max"):
    out = []
    for L in range(1, 9):
        layers, hidden = ar32(L)
        params = 12 * layers * hidden * hidden
        for s in range(seeds):
            out.append({
                "layers": layers, "hidden": hidden, "task": task, "family": family,
                "pretrain_seed": 0, "finetune_seed": s, "metric": metric,
                "value": round(value(params, alpha, c) * WIGGLE[s % len(WIGGLE)], 6),
                "direction": direction, "tokens": 1000000 * L,
            })
    return out


def write_jsonl(name, records):
    with open(os.path.join(HERE, name), "w") as f:
        for r in records:
            f.write(json.dumps(r) + "\n")


write_jsonl("runs_8x5.jsonl", rows("squad", "mlm", "f1", 0.08, 50.0, 5))
write_jsonl("two_families.jsonl",
            rows("squad", "mlm", "f1", 0.08, 50.0, 3) + rows("squad", "pmi", "f1", 0.08, 51.0, 3))
write_jsonl("mismatched_metrics.jsonl",
            rows("squad", "mlm", "f1", 0.08, 50.0, 2) + rows("squad", "pmi", "acc", 0.08, 51.0, 2))
write_jsonl("loss_8x3.jsonl", rows("pretrain", "mlm", "eval_loss", -0.07, 4.0, 3, "min"))

cols = ["layers", "hidden", "params", "task", "family", "pretrain_seed",
        "finetune_seed", "metric", "value", "direction", "tokens"]
with open(os.path.join(HERE, "runs_8x5.csv"), "w") as f:
    f.write(",".join(cols) + "\n")
    for r in rows("squad", "mlm", "f1", 0.08, 50.0, 5):
        f.write(",".join("" if r.get(c) is None else str(r[c]) for c in cols) + "\n")

# Plateau from step 3 to 8, then a drop.
losses = [3.0, 2.6, 2.4, 2.35, 2.35, 2.36, 2.35, 2.36, 2.35, 2.1, 2.0, 1.95]
with open(os.path.join(HERE, "plateau_curve.csv"), "w") as f:
    f.write("step,eval_loss\n")
    for i, l in enumerate(losses):
        f.write(f"{500 * i},{l}\n")
