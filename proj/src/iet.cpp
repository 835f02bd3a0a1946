#include "flowlab/iet.hpp"

#include <algorithm>
#include <cmath>

#include "flowlab/errors.hpp"

namespace flowlab {

Iet::Iet(Permutation p, std::vector<double> lengths, double log_scale)
    : perm_(std::move(p)), lengths_(std::move(lengths)), log_scale_(log_scale) {
    const int d = perm_.size();
    if (lengths_.size() != static_cast<size_t>(d))
        throw ConfigInvalid("length vector size does not match alphabet");
    for (double l : lengths_)
        if (!(l > 0.0) || !std::isfinite(l)) throw ConfigInvalid("lengths must be positive finite");
    left_.assign(d, 0.0);
    img_left_.assign(d, 0.0);
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
        left_[i] = acc;
        acc += lengths_[perm_.top()[i]];
    }
    total_ = acc;
    acc = 0.0;
    for (int i = 0; i < d; ++i) {
        img_left_[i] = acc;
        acc += lengths_[perm_.bottom()[i]];
    }
}

int Iet::letter_at(double x) const {
    const int d = perm_.size();
    int lo = 0, hi = d - 1;
    while (lo < hi) {  // largest i with left_[i] <= x
        int mid = (lo + hi + 1) / 2;
        if (left_[mid] <= x) lo = mid;
        else hi = mid - 1;
    }
    return perm_.top()[lo];
}

double Iet::apply(double x) const {
    const int d = perm_.size();
    const double tol = kTieTolerance * total_;
    for (int i = 1; i < d; ++i)
        if (std::abs(x - left_[i]) <= tol) throw DiscontinuityHit(x);
    if (x < 0.0 || x >= total_) throw NonFiniteInput();
    int a = letter_at(x);
    return x + translation(a);
}

Iet Iet::normalized() const {
    std::vector<double> l = lengths_;
    for (double& v : l) v /= total_;
    return Iet(perm_, std::move(l), log_scale_ + std::log(total_));
}

namespace {

std::vector<std::vector<std::int64_t>> identity_matrix(int d) {
    std::vector<std::vector<std::int64_t>> m(d, std::vector<std::int64_t>(d, 0));
    for (int i = 0; i < d; ++i) m[i][i] = 1;
    return m;
}

}  // namespace

std::pair<Iet, RauzyStep> rauzy_step(const Iet& iet) {
    const Permutation& p = iet.permutation();
    const int d = p.size();
    const int top_last = p.top()[d - 1];
    const int bottom_last = p.bottom()[d - 1];
    const double lt = iet.lengths()[top_last];
    const double lb = iet.lengths()[bottom_last];
    if (std::abs(lt - lb) <= kTieTolerance * iet.total_length()) throw ConnectionDetected();

    RauzyStep step;
    int winner, loser;
    std::vector<int> top = p.top(), bottom = p.bottom();
    if (lt > lb) {
        // top wins: bottom's last letter loses and is reinserted in the bottom
        // row right after the winner
        step.step_type = RauzyStep::Type::top;
        winner = top_last;
        loser = bottom_last;
        bottom.pop_back();
        auto pos = std::find(bottom.begin(), bottom.end(), winner);
        bottom.insert(pos + 1, loser);
    } else {
        step.step_type = RauzyStep::Type::bottom;
        winner = bottom_last;
        loser = top_last;
        top.pop_back();
        auto pos = std::find(top.begin(), top.end(), winner);
        top.insert(pos + 1, loser);
    }
    step.winner = winner;
    step.loser = loser;
    step.elementary_matrix = identity_matrix(d);
    step.elementary_matrix[winner][loser] = 1;

    std::vector<double> lengths = iet.lengths();
    lengths[winner] = lengths[winner] - lengths[loser];
    Iet induced(Permutation(std::move(top), std::move(bottom)), std::move(lengths),
                iet.log_scale());
    return {std::move(induced), std::move(step)};
}

ZorichStep zorich_step(const Iet& iet) {
    auto [cur, first] = rauzy_step(iet);
    const int d = iet.size();
    const RauzyStep::Type run_type = first.step_type;
    auto acc = first.elementary_matrix;
    std::vector<RauzyStep> moves{std::move(first)};
    for (;;) {
        const Permutation& p = cur.permutation();
        const int tl = p.top()[d - 1], bl = p.bottom()[d - 1];
        const double lt = cur.lengths()[tl], lb = cur.lengths()[bl];
        if (std::abs(lt - lb) <= kTieTolerance * cur.total_length()) throw ConnectionDetected();
        RauzyStep::Type next = lt > lb ? RauzyStep::Type::top : RauzyStep::Type::bottom;
        if (next != run_type) break;
        auto [ind, step] = rauzy_step(cur);
        cur = std::move(ind);
        // accumulate E on the right: column(loser) += column(winner)
        for (int r = 0; r < d; ++r) acc[r][step.loser] += acc[r][step.winner];
        moves.push_back(std::move(step));
    }
    int count = static_cast<int>(moves.size());
    return ZorichStep{std::move(cur), std::move(acc), std::move(moves), count, run_type};
}

}  // namespace flowlab
