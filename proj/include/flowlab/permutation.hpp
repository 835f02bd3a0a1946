#ifndef FLOWLAB_PERMUTATION_HPP
#define FLOWLAB_PERMUTATION_HPP

#include <string>
#include <vector>

namespace flowlab {

/** Labeled permutation datum of an interval exchange.
 *
 * Letters are indices 0..d-1.  top[i] / bottom[i] give the letter at position
 * i (0-based) in the top, resp. bottom, row.  Both rows are bijections onto
 * the alphabet; irreducibility means no proper prefix of the top row is a
 * permutation of the same-length prefix of the bottom row.
 */
class Permutation {
  public:
    Permutation(std::vector<int> top, std::vector<int> bottom);

    /// Rows given as whitespace-separated letter tokens ("a b c d", "d c b a").
    static Permutation parse(const std::string& top_row, const std::string& bottom_row);

    /// Symmetric permutation (a b ... / ... b a) on d letters.
    static Permutation symmetric(int d);

    int size() const { return d_; }
    const std::vector<int>& top() const { return top_; }
    const std::vector<int>& bottom() const { return bottom_; }

    /// Position (0-based) of a letter in each row.
    int top_position(int letter) const { return top_pos_[letter]; }
    int bottom_position(int letter) const { return bottom_pos_[letter]; }

    bool irreducible() const;

    /// Antisymmetric intersection matrix: Omega[a][b] = +1 when b comes before
    /// a on top and after a on the bottom, -1 in the mirrored case, else 0.
    std::vector<std::vector<long long>> intersection_matrix() const;

    int omega_rank() const;

    bool operator==(const Permutation& o) const {
        return top_ == o.top_ && bottom_ == o.bottom_;
    }

    std::string to_text() const;  // two letter rows, one per line

  private:
    int d_;
    std::vector<int> top_, bottom_;
    std::vector<int> top_pos_, bottom_pos_;
};

struct StratumInfo {
    int genus = 0;
    std::vector<int> kappa;  // orders of the actual zeros, descending
    int marked_points = 0;   // regular vertices (order-0 cone points)
    int singularities = 0;   // all vertices, zeros and marked points alike
};

/// Singularity data of the suspended surface, from the vertex cycles of the
/// suspension polygon.  Requires an irreducible permutation.
StratumInfo genus_and_stratum(const Permutation& p);

}  // namespace flowlab

#endif
