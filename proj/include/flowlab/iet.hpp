#ifndef FLOWLAB_IET_HPP
#define FLOWLAB_IET_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "flowlab/errors.hpp"
#include "flowlab/permutation.hpp"

namespace flowlab {

/// Relative tie tolerance: two subinterval endpoints closer than this times
/// the total length are treated as coinciding (saddle connection).
inline constexpr double kTieTolerance = 1e-12;

/// Clearance below which a flow orbit is declared singular near a corner.
inline constexpr double kSingularClearance = 1e-12;

struct RauzyStep {
    enum class Type { top, bottom };
    Type step_type;
    int winner = -1;
    int loser = -1;
    /// Elementary matrix E = Id + E_{winner,loser}; lengths_old = E * lengths_new.
    std::vector<std::vector<std::int64_t>> elementary_matrix;
};

/** Interval exchange transformation: lengths plus permutation.
 *
 * The map acts on [0, total_length); interval of letter a occupies the slot
 * given by the top order and is translated to its bottom-order slot.
 * Instances are immutable after construction; induction returns new values.
 */
class Iet {
  public:
    Iet(Permutation p, std::vector<double> lengths, double log_scale = 0.0);

    const Permutation& permutation() const { return perm_; }
    const std::vector<double>& lengths() const { return lengths_; }
    double total_length() const { return total_; }
    /// Accumulated log of rescalings applied by normalize().
    double log_scale() const { return log_scale_; }

    int size() const { return perm_.size(); }

    /// Left endpoint of letter a's interval (domain side / image side).
    double left_endpoint(int letter) const { return left_[perm_.top_position(letter)]; }
    double image_left_endpoint(int letter) const {
        return img_left_[perm_.bottom_position(letter)];
    }
    /// Translation applied on letter a's interval.
    double translation(int letter) const {
        return image_left_endpoint(letter) - left_endpoint(letter);
    }

    /// Letter whose domain interval contains x in [0,total).
    int letter_at(double x) const;

    /// Piecewise translation; throws DiscontinuityHit within tie tolerance of
    /// an interior cut point.
    double apply(double x) const;

    /// Rescale to total length 1, accumulating the log of the factor.
    Iet normalized() const;

  private:
    Permutation perm_;
    std::vector<double> lengths_;
    std::vector<double> left_;      // cumulative left endpoints in top order
    std::vector<double> img_left_;  // cumulative left endpoints in bottom order
    double total_;
    double log_scale_;
};

/// One step of Rauzy-Veech induction.  Throws ConnectionDetected when the two
/// last-letter lengths tie within tolerance.
std::pair<Iet, RauzyStep> rauzy_step(const Iet& iet);

struct ZorichStep {
    Iet induced;                                          // after the full run
    std::vector<std::vector<std::int64_t>> accumulated_matrix;  // product of elementaries
    std::vector<RauzyStep> moves;                         // the run, in order
    int step_count = 0;
    RauzyStep::Type run_type;
};

/// Maximal run of same-type Rauzy steps (one Zorich-accelerated step).
ZorichStep zorich_step(const Iet& iet);

/** Allocation-free induction stepper for long Zorich paths.
 *
 * Keeps the row orders and lengths in place and reports each Rauzy move
 * through a callback; lengths are renormalized to sum 1 after every
 * accelerated step with the Teichmueller time accumulated.  Semantically
 * one zorich() call equals zorich_step() on the equivalent Iet.
 */
class InductionWalker {
  public:
    InductionWalker(const Permutation& p, std::vector<double> lengths)
        : top_(p.top()), bottom_(p.bottom()), lengths_(std::move(lengths)) {
        total_ = 0.0;
        for (double l : lengths_) total_ += l;
        for (double& l : lengths_) l /= total_;
        total_ = 1.0;
    }

    double teich_time() const { return t_; }
    const std::vector<int>& top() const { return top_; }
    const std::vector<int>& bottom() const { return bottom_; }
    const std::vector<double>& lengths() const { return lengths_; }

    /// cb(is_bottom, winner, loser) per Rauzy move; returns the run length.
    template <class Cb>
    int zorich(Cb&& cb) {
        const int d = static_cast<int>(top_.size());
        int tl = top_[d - 1], bl = bottom_[d - 1];
        if (std::abs(lengths_[tl] - lengths_[bl]) <= kTieTolerance * total_)
            throw ConnectionDetected();
        const bool bottom_run = lengths_[bl] > lengths_[tl];
        int count = 0;
        for (;;) {
            tl = top_[d - 1];
            bl = bottom_[d - 1];
            const double lt = lengths_[tl], lb = lengths_[bl];
            if (std::abs(lt - lb) <= kTieTolerance * total_) throw ConnectionDetected();
            if ((lb > lt) != bottom_run) break;
            int winner = bottom_run ? bl : tl;
            int loser = bottom_run ? tl : bl;
            lengths_[winner] -= lengths_[loser];
            total_ -= lengths_[loser];
            // reinsert the loser right after the winner in the changing row
            std::vector<int>& row = bottom_run ? top_ : bottom_;
            int pos = 0;
            while (row[pos] != winner) ++pos;
            for (int i = d - 1; i > pos + 1; --i) row[i] = row[i - 1];
            row[pos + 1] = loser;
            cb(bottom_run, winner, loser);
            ++count;
        }
        total_ = 0.0;  // refresh the running sum before renormalizing
        for (double l : lengths_) total_ += l;
        t_ += -std::log(total_);
        double inv = 1.0 / total_;
        for (double& l : lengths_) l *= inv;
        total_ = 1.0;
        return count;
    }

  private:
    std::vector<int> top_, bottom_;
    std::vector<double> lengths_;
    double total_ = 1.0;
    double t_ = 0.0;
};

}  // namespace flowlab

#endif
