#include "mocap/sources/evaluation.hpp"

#include "mocap/tracker/hungarian.hpp"

#include <map>
#include <stdexcept>

namespace mocap::sources {

TrackingReport evaluate_tracking(std::span<const GroundTruthFrame> truth, std::span<const EmittedFrame> emitted) {
    std::map<std::int64_t, const EmittedFrame*> by_index;
    for (const auto& e : emitted) {
        by_index[e.frame_index] = &e;
    }

    TrackingReport report;
    std::map<int, TrackId> identity;  // true person -> last matched track
    double error_sum = 0.0;
    const EmittedFrame empty;

    for (const auto& gt : truth) {
        const auto it = by_index.find(gt.frame_index);
        const EmittedFrame& em = it != by_index.end() ? *it->second : empty;
        report.ground_truth_total += gt.persons.size();

        std::vector<int> gt_to_em(gt.persons.size(), -1);
        Eigen::MatrixXd dist(gt.persons.size(), em.pairs.size());
        for (std::size_t i = 0; i < gt.persons.size(); ++i) {
            for (std::size_t j = 0; j < em.pairs.size(); ++j) {
                dist(i, j) = (gt.persons[i].second.translation - em.pairs[j].second.translation).norm();
            }
        }
        if (dist.size() > 0) {
            gt_to_em = tracking::min_cost_assignment(dist).row_to_col;
        }

        std::vector<char> em_used(em.pairs.size(), 0);
        double frame_sum = 0.0;
        std::size_t frame_matches = 0;
        for (std::size_t i = 0; i < gt.persons.size(); ++i) {
            const int j = gt_to_em[i];
            if (j < 0 || dist(i, j) > kMatchRadius) {
                ++report.misses;
                continue;
            }
            em_used[j] = 1;
            ++report.matched;
            ++frame_matches;
            frame_sum += dist(i, j);

            const int person = gt.persons[i].first;
            const TrackId track = em.pairs[j].first;
            const auto prev = identity.find(person);
            if (prev != identity.end() && prev->second != track) {
                ++report.id_switches;
            }
            identity[person] = track;
        }
        for (const char used : em_used) {
            if (!used) ++report.false_tracks;
        }
        if (frame_matches > 0) {
            report.per_frame_error.emplace_back(gt.frame_index, frame_sum / static_cast<double>(frame_matches));
            error_sum += frame_sum;
        }
    }
    if (report.matched > 0) {
        report.mean_translation_error = error_sum / static_cast<double>(report.matched);
    }
    return report;
}

JitterReport jitter_metric(std::span<const MotionFrame> frames) {
    if (frames.size() < 3) {
        throw std::invalid_argument("jitter metric needs at least 3 frames");
    }
    const double span = frames.back().timestamp - frames.front().timestamp;
    if (!(span > 0.0)) {
        throw std::invalid_argument("jitter metric needs increasing timestamps");
    }
    const double rate = static_cast<double>(frames.size() - 1) / span;
    const double r4 = rate * rate * rate * rate;

    const auto second_diff_sq = [&](const Vec3& a, const Vec3& b, const Vec3& c) {
        return (a - 2.0 * b + c).squaredNorm() * r4;
    };

    double orient = 0.0, pose = 0.0, trans = 0.0;
    for (std::size_t k = 1; k + 1 < frames.size(); ++k) {
        const MotionFrame& p = frames[k - 1];
        const MotionFrame& c = frames[k];
        const MotionFrame& n = frames[k + 1];
        orient += second_diff_sq(p.global_orient, c.global_orient, n.global_orient);
        for (std::size_t j = 0; j < kBodyJointCount; ++j) {
            pose += second_diff_sq(p.body_pose[j], c.body_pose[j], n.body_pose[j]);
        }
        trans += second_diff_sq(p.translation, c.translation, n.translation);
    }
    const double samples = static_cast<double>(frames.size() - 2);
    return JitterReport{orient / (3.0 * samples), pose / (static_cast<double>(kPoseChannelCount) * samples),
                        trans / (3.0 * samples)};
}

} // namespace mocap::sources
