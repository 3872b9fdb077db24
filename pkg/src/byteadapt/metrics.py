"""CLEAR MOT and IDF1 evaluation.

Per frame, ground-truth objects keep the hypothesis they were last matched
to if it is present and still within the IoU gate; everything else goes to
a gated min-cost assignment on ``1 - IoU``. An identity switch is counted
when an object's matched hypothesis differs from the one it was last
matched to. A fragmentation is counted each time an object trajectory goes
matched -> unmatched -> matched, over the frames where the object exists.

IDF1 uses one global one-to-one matching of object ids to hypothesis ids
that maximizes the number of frames where the pair overlaps within the gate.
"""
from collections import defaultdict
from dataclasses import asdict, dataclass

import numpy as np

from .assignment import solve
from .geometry import boxes_to_array, iou_matrix
from .tracker import FrameResult

KV_KEYS = ("mota", "idf1", "fp", "fn", "idsw", "frag", "mt", "ml", "gt_count", "idtp", "idfp", "idfn")


class EmptyGroundTruthError(ValueError):
    """MOTA is undefined without ground-truth boxes."""


@dataclass
class EvalReport:
    mota: float
    idf1: float
    fp: int
    fn: int
    id_switches: int
    fragmentations: int
    mostly_tracked: int
    mostly_lost: int
    gt_count: int
    idtp: int = 0
    idfp: int = 0
    idfn: int = 0
    hota: float = None  # reserved, not computed

    def as_kv(self):
        values = {
            "mota": self.mota, "idf1": self.idf1, "fp": self.fp, "fn": self.fn,
            "idsw": self.id_switches, "frag": self.fragmentations,
            "mt": self.mostly_tracked, "ml": self.mostly_lost, "gt_count": self.gt_count,
            "idtp": self.idtp, "idfp": self.idfp, "idfn": self.idfn,
        }
        lines = []
        for key in KV_KEYS:
            v = values[key]
            lines.append(f"{key}={v:.6f}" if isinstance(v, float) else f"{key}={v}")
        return "\n".join(lines) + "\n"

    def as_table(self):
        rows = [("MOTA", f"{self.mota:.4f}"), ("IDF1", f"{self.idf1:.4f}"),
                ("MT", str(self.mostly_tracked)), ("ML", str(self.mostly_lost)),
                ("FP", str(self.fp)), ("FN", str(self.fn)),
                ("IDSW", str(self.id_switches)), ("Frag", str(self.fragmentations)),
                ("GT", str(self.gt_count))]
        header = " ".join(f"{name:>8}" for name, _ in rows)
        values = " ".join(f"{value:>8}" for _, value in rows)
        return header + "\n" + values + "\n"

    def to_dict(self):
        return asdict(self)


def _as_frames(results):
    if isinstance(results, dict):
        return results
    return {r.frame: list(r.outputs) for r in results if isinstance(r, FrameResult)}


def evaluate(gt, results, iou_gate=0.5):
    """Score ``results`` against ``gt``; both map frame -> objects with ``.id`` and ``.bbox``."""
    if not 0.0 < iou_gate <= 1.0:
        raise ValueError(f"iou_gate must be in (0, 1], got {iou_gate}")
    results = _as_frames(results)
    gt_count = sum(len(v) for v in gt.values())
    if gt_count == 0:
        raise EmptyGroundTruthError("ground truth contains no boxes")
    cost_gate = 1.0 - iou_gate

    last_match = {}
    presence = defaultdict(list)  # gt id -> matched flag per frame present
    overlap = defaultdict(int)    # (gt id, hyp id) -> frames within gate
    gt_per_id = defaultdict(int)
    hyp_per_id = defaultdict(int)
    fp = fn = idsw = 0

    for frame in sorted(set(gt) | set(results)):
        objs = list(gt.get(frame, []))
        hyps = list(results.get(frame, []))
        for o in objs:
            gt_per_id[o.id] += 1
        for h in hyps:
            hyp_per_id[h.id] += 1
        if objs and hyps:
            cost = 1.0 - iou_matrix(boxes_to_array([o.bbox for o in objs]),
                                    boxes_to_array([h.bbox for h in hyps]))
        else:
            cost = np.ones((len(objs), len(hyps)))
        within = cost <= cost_gate
        for i, j in zip(*np.nonzero(within)):
            overlap[objs[i].id, hyps[j].id] += 1

        hyp_index = {h.id: j for j, h in enumerate(hyps)}
        pairs = []
        taken_o, taken_h = set(), set()
        for i, o in enumerate(objs):
            j = hyp_index.get(last_match.get(o.id))
            if j is not None and j not in taken_h and within[i, j]:
                pairs.append((i, j))
                taken_o.add(i)
                taken_h.add(j)
        free_o = [i for i in range(len(objs)) if i not in taken_o]
        free_h = [j for j in range(len(hyps)) if j not in taken_h]
        if free_o and free_h:
            res = solve(cost[np.ix_(free_o, free_h)], cost_gate)
            pairs += [(free_o[a], free_h[b]) for a, b in res.matches]

        matched_o = set()
        for i, j in pairs:
            oid, hid = objs[i].id, hyps[j].id
            if oid in last_match and last_match[oid] != hid:
                idsw += 1
            last_match[oid] = hid
            matched_o.add(i)
        fn += len(objs) - len(pairs)
        fp += len(hyps) - len(pairs)
        for i, o in enumerate(objs):
            presence[o.id].append(i in matched_o)

    frag = mt = ml = 0
    for flags in presence.values():
        seen = False
        for prev, cur in zip([False] + flags[:-1], flags):
            if cur and not prev and seen:
                frag += 1
            seen = seen or cur
        ratio = sum(flags) / len(flags)
        if ratio >= 0.8:
            mt += 1
        if ratio <= 0.2:
            ml += 1

    idtp = _best_identity_overlap(overlap)
    total_hyp = sum(hyp_per_id.values())
    idfn = gt_count - idtp
    idfp = total_hyp - idtp
    idf1 = 2 * idtp / (gt_count + total_hyp)
    mota = 1.0 - (fp + fn + idsw) / gt_count
    return EvalReport(mota=mota, idf1=idf1, fp=fp, fn=fn, id_switches=idsw,
                      fragmentations=frag, mostly_tracked=mt, mostly_lost=ml,
                      gt_count=gt_count, idtp=idtp, idfp=idfp, idfn=idfn)


def _best_identity_overlap(overlap):
    """Max total overlap over one-to-one id pairings."""
    if not overlap:
        return 0
    # ids that never overlap anything cannot contribute
    gt_ids = sorted({g for g, _ in overlap})
    hyp_ids = sorted({h for _, h in overlap})
    gi = {g: i for i, g in enumerate(gt_ids)}
    hi = {h: j for j, h in enumerate(hyp_ids)}
    counts = np.zeros((len(gt_ids), len(hyp_ids)))
    for (g, h), n in overlap.items():
        counts[gi[g], hi[h]] = n
    # every cost is <= 0, so a maximum-cardinality matching loses nothing
    res = solve(-counts, 0.0)
    return int(sum(counts[i, j] for i, j in res.matches))
