#include "motpipe/metrics.hpp"

#include <algorithm>
#include <set>

#include "motpipe/assoc.hpp"
#include "motpipe/dataio.hpp"

namespace motpipe {

FrameMatches match_frame(const std::vector<IdBox>& gt, const std::vector<IdBox>& hyp,
                         const std::map<int, int>& last_match, double iou_min) {
    FrameMatches out;
    std::vector<char> gt_used(gt.size(), 0), hyp_used(hyp.size(), 0);

    // Index hypotheses by id for the persistence pass.
    std::map<int, int> hyp_pos;
    for (size_t j = 0; j < hyp.size(); ++j) {
        hyp_pos.emplace(hyp[j].id, static_cast<int>(j));
    }

    // Keep still-feasible pairs from the last known correspondence, in gt id
    // order so collisions on a shared hypothesis resolve deterministically.
    std::vector<int> gt_order(gt.size());
    for (size_t i = 0; i < gt.size(); ++i) gt_order[i] = static_cast<int>(i);
    std::stable_sort(gt_order.begin(), gt_order.end(),
                     [&](int a, int b) { return gt[static_cast<size_t>(a)].id < gt[static_cast<size_t>(b)].id; });

    for (int i : gt_order) {
        const auto prev = last_match.find(gt[static_cast<size_t>(i)].id);
        if (prev == last_match.end()) continue;
        const auto pos = hyp_pos.find(prev->second);
        if (pos == hyp_pos.end() || hyp_used[static_cast<size_t>(pos->second)]) continue;
        if (iou(gt[static_cast<size_t>(i)].bbox, hyp[static_cast<size_t>(pos->second)].bbox) >= iou_min) {
            gt_used[static_cast<size_t>(i)] = 1;
            hyp_used[static_cast<size_t>(pos->second)] = 1;
            out.pairs.emplace_back(gt[static_cast<size_t>(i)].id, prev->second);
        }
    }

    // Optimal assignment of the remainder on 1 - IoU.
    std::vector<int> free_gt, free_hyp;
    for (size_t i = 0; i < gt.size(); ++i) {
        if (!gt_used[i]) free_gt.push_back(static_cast<int>(i));
    }
    for (size_t j = 0; j < hyp.size(); ++j) {
        if (!hyp_used[j]) free_hyp.push_back(static_cast<int>(j));
    }
    if (!free_gt.empty() && !free_hyp.empty()) {
        auto costs = CostMatrix::filled(static_cast<int>(free_gt.size()),
                                        static_cast<int>(free_hyp.size()), kInfeasible);
        for (int r = 0; r < costs.rows; ++r) {
            for (int c = 0; c < costs.cols; ++c) {
                const double ov = iou(gt[static_cast<size_t>(free_gt[static_cast<size_t>(r)])].bbox,
                                      hyp[static_cast<size_t>(free_hyp[static_cast<size_t>(c)])].bbox);
                if (ov >= iou_min) {
                    costs.at(r, c) = 1.0 - ov;
                }
            }
        }
        const auto assigned = solve_assignment(costs);
        for (const auto& [r, c] : assigned.matches) {
            const int i = free_gt[static_cast<size_t>(r)];
            const int j = free_hyp[static_cast<size_t>(c)];
            gt_used[static_cast<size_t>(i)] = 1;
            hyp_used[static_cast<size_t>(j)] = 1;
            out.pairs.emplace_back(gt[static_cast<size_t>(i)].id, hyp[static_cast<size_t>(j)].id);
        }
    }

    for (size_t i = 0; i < gt.size(); ++i) {
        if (!gt_used[i]) ++out.fn;
    }
    for (size_t j = 0; j < hyp.size(); ++j) {
        if (!hyp_used[j]) ++out.fp;
    }
    for (const auto& [gid, hid] : out.pairs) {
        const auto prev = last_match.find(gid);
        if (prev != last_match.end() && prev->second != hid) {
            ++out.idsw;
        }
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
}

std::optional<double> mota(const EvalCounts& counts) {
    if (counts.gt == 0) {
        return std::nullopt;
    }
    return 1.0 - static_cast<double>(counts.fn + counts.fp + counts.idsw) /
                     static_cast<double>(counts.gt);
}

IdScores idf1(const Trajectories& gt, const Trajectories& hyp, double iou_min) {
    IdScores out;
    long long total_gt = 0, total_hyp = 0;
    for (const auto& [id, frames] : gt) total_gt += static_cast<long long>(frames.size());
    for (const auto& [id, frames] : hyp) total_hyp += static_cast<long long>(frames.size());

    long long best = 0;
    if (!gt.empty() && !hyp.empty()) {
        std::vector<const std::map<int, BBox>*> gts, hyps;
        for (const auto& [id, frames] : gt) gts.push_back(&frames);
        for (const auto& [id, frames] : hyp) hyps.push_back(&frames);

        // Frames where a (gt, hyp) identity pair overlaps feasibly.
        const int R = static_cast<int>(gts.size());
        const int C = static_cast<int>(hyps.size());
        std::vector<long long> overlap(static_cast<size_t>(R) * static_cast<size_t>(C), 0);
        long long max_overlap = 0;
        for (int r = 0; r < R; ++r) {
            for (int c = 0; c < C; ++c) {
                long long n = 0;
                for (const auto& [frame, box] : *gts[static_cast<size_t>(r)]) {
                    const auto h = hyps[static_cast<size_t>(c)]->find(frame);
                    if (h != hyps[static_cast<size_t>(c)]->end() && iou(box, h->second) >= iou_min) {
                        ++n;
                    }
                }
                overlap[static_cast<size_t>(r) * static_cast<size_t>(C) + static_cast<size_t>(c)] = n;
                max_overlap = std::max(max_overlap, n);
            }
        }

        // Maximize total overlap: minimize (max_overlap - overlap) over a full
        // assignment of the smaller side (pair count is fixed, so equivalent).
        auto costs = CostMatrix::filled(R, C, 0.0);
        for (int r = 0; r < R; ++r) {
            for (int c = 0; c < C; ++c) {
                costs.at(r, c) = static_cast<double>(
                    max_overlap - overlap[static_cast<size_t>(r) * static_cast<size_t>(C) +
                                          static_cast<size_t>(c)]);
            }
        }
        const auto assigned = solve_assignment(costs);
        for (const auto& [r, c] : assigned.matches) {
            best += overlap[static_cast<size_t>(r) * static_cast<size_t>(C) + static_cast<size_t>(c)];
        }
    }

    out.idtp = best;
    out.idfn = total_gt - best;
    out.idfp = total_hyp - best;
    if (total_gt == 0 && total_hyp == 0) {
        out.idf1 = 1.0;
    } else {
        out.idf1 = 2.0 * static_cast<double>(out.idtp) / static_cast<double>(total_gt + total_hyp);
    }
    out.idp = total_hyp == 0 ? 1.0 : static_cast<double>(out.idtp) / static_cast<double>(total_hyp);
    out.idr = total_gt == 0 ? 1.0 : static_cast<double>(out.idtp) / static_cast<double>(total_gt);
    return out;
}

std::pair<double, double> precision_recall(const EvalCounts& counts) {
    const double precision =
        counts.tp + counts.fp == 0
            ? 1.0
            : static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
    const double recall =
        counts.tp + counts.fn == 0
            ? 1.0
            : static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
    return {precision, recall};
}

Trajectories to_trajectories(const FrameBoxes& boxes) {
    Trajectories out;
    for (const auto& [frame, list] : boxes) {
        for (const auto& b : list) {
            out[b.id].emplace(frame, b.bbox);
        }
    }
    return out;
}

SequenceEval evaluate_sequence(const std::string& name, const FrameBoxes& gt,
                               const FrameBoxes& hyp, const EvalConfig& cfg) {
    SequenceEval out;
    out.sequence = name;

    std::set<int> frames;
    for (const auto& [f, boxes] : gt) frames.insert(f);
    for (const auto& [f, boxes] : hyp) frames.insert(f);

    static const std::vector<IdBox> kEmpty;
    std::map<int, int> last_match;
    for (int f : frames) {
        const auto g = gt.find(f);
        const auto h = hyp.find(f);
        const auto& gboxes = g == gt.end() ? kEmpty : g->second;
        const auto& hboxes = h == hyp.end() ? kEmpty : h->second;
        const auto m = match_frame(gboxes, hboxes, last_match, cfg.match_iou_min);
        out.counts.gt += static_cast<long long>(gboxes.size());
        out.counts.tp += static_cast<long long>(m.pairs.size());
        out.counts.fp += m.fp;
        out.counts.fn += m.fn;
        out.counts.idsw += m.idsw;
        for (const auto& [gid, hid] : m.pairs) {
            last_match[gid] = hid;
        }
    }

    const auto ids = idf1(to_trajectories(gt), to_trajectories(hyp), cfg.match_iou_min);
    out.counts.idtp = ids.idtp;
    out.counts.idfp = ids.idfp;
    out.counts.idfn = ids.idfn;
    out.idf1 = ids.idf1;
    out.idp = ids.idp;
    out.idr = ids.idr;
    out.mota = mota(out.counts);
    std::tie(out.precision, out.recall) = precision_recall(out.counts);
    return out;
}

SequenceEval aggregate(const std::vector<SequenceEval>& evals) {
    SequenceEval out;
    out.sequence = "AGGREGATE";
    for (const auto& e : evals) {
        out.counts.gt += e.counts.gt;
        out.counts.tp += e.counts.tp;
        out.counts.fp += e.counts.fp;
        out.counts.fn += e.counts.fn;
        out.counts.idsw += e.counts.idsw;
        out.counts.idtp += e.counts.idtp;
        out.counts.idfp += e.counts.idfp;
        out.counts.idfn += e.counts.idfn;
    }
    out.mota = mota(out.counts);
    std::tie(out.precision, out.recall) = precision_recall(out.counts);
    const long long denom = 2 * out.counts.idtp + out.counts.idfp + out.counts.idfn;
    out.idf1 = denom == 0 ? 1.0 : 2.0 * static_cast<double>(out.counts.idtp) / static_cast<double>(denom);
    out.idp = out.counts.idtp + out.counts.idfp == 0
                  ? 1.0
                  : static_cast<double>(out.counts.idtp) /
                        static_cast<double>(out.counts.idtp + out.counts.idfp);
    out.idr = out.counts.idtp + out.counts.idfn == 0
                  ? 1.0
                  : static_cast<double>(out.counts.idtp) /
                        static_cast<double>(out.counts.idtp + out.counts.idfn);
    return out;
}

std::string write_report_csv(const std::vector<SequenceEval>& evals) {
    std::string out = "sequence,gt,tp,fp,fn,idsw,mota,idf1,idp,idr,precision,recall\n";
    auto row = [&out](const SequenceEval& e) {
        out += e.sequence;
        out += ',' + std::to_string(e.counts.gt);
        out += ',' + std::to_string(e.counts.tp);
        out += ',' + std::to_string(e.counts.fp);
        out += ',' + std::to_string(e.counts.fn);
        out += ',' + std::to_string(e.counts.idsw);
        out += ',';
        if (e.mota.has_value()) out += format_fixed(*e.mota, 6);
        out += ',' + format_fixed(e.idf1, 6);
        out += ',' + format_fixed(e.idp, 6);
        out += ',' + format_fixed(e.idr, 6);
        out += ',' + format_fixed(e.precision, 6);
        out += ',' + format_fixed(e.recall, 6);
        out += '\n';
    };
    for (const auto& e : evals) row(e);
    if (evals.size() > 1) row(aggregate(evals));
    return out;
}

}  // namespace motpipe
