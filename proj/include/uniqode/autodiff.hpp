#ifndef UNIQODE_AUTODIFF_HPP
#define UNIQODE_AUTODIFF_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "uniqode/errors.hpp"

namespace uniqode::ad {

// Reverse-mode tape over scalar operations. Every node is a scalar;
// local partials are stored at record time so backward() is a single
// reverse sweep over the node array.
class Tape {
public:
    using Index = int;

    Index leaf(double value) {
        return push(value, -1, -1, 0.0, 0.0);
    }

    Index constant(double value) { return leaf(value); }

    Index add(Index a, Index b) {
        return push(val(a) + val(b), a, b, 1.0, 1.0);
    }
    Index sub(Index a, Index b) {
        return push(val(a) - val(b), a, b, 1.0, -1.0);
    }
    Index mul(Index a, Index b) {
        return push(val(a) * val(b), a, b, val(b), val(a));
    }
    Index div(Index a, Index b) {
        const double vb = val(b);
        return push(val(a) / vb, a, b, 1.0 / vb, -val(a) / (vb * vb));
    }
    Index neg(Index a) { return push(-val(a), a, -1, -1.0, 0.0); }
    Index scale(Index a, double c) { return push(c * val(a), a, -1, c, 0.0); }
    Index shift(Index a, double c) { return push(val(a) + c, a, -1, 1.0, 0.0); }
    Index square(Index a) { return push(val(a) * val(a), a, -1, 2.0 * val(a), 0.0); }
    Index tanh(Index a) {
        const double t = std::tanh(val(a));
        return push(t, a, -1, 1.0 - t * t, 0.0);
    }
    Index exp(Index a) {
        const double e = std::exp(val(a));
        return push(e, a, -1, e, 0.0);
    }
    Index log(Index a) {
        return push(std::log(val(a)), a, -1, 1.0 / val(a), 0.0);
    }

    double val(Index i) const { return nodes_[static_cast<size_t>(i)].value; }
    size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }

    // Adjoints of every node with respect to the scalar rooted at `root`.
    // Nodes not on a path to the root get an exact 0.
    std::vector<double> backward(Index root) const {
        if (root < 0 || static_cast<size_t>(root) >= nodes_.size()) {
            throw UsageError("tape backward: root is not a recorded scalar node");
        }
        std::vector<double> adj(nodes_.size(), 0.0);
        adj[static_cast<size_t>(root)] = 1.0;
        for (size_t i = nodes_.size(); i-- > 0;) {
            const Node& n = nodes_[i];
            const double a = adj[i];
            if (a == 0.0) continue;
            if (n.parent_a >= 0) adj[static_cast<size_t>(n.parent_a)] += n.partial_a * a;
            if (n.parent_b >= 0) adj[static_cast<size_t>(n.parent_b)] += n.partial_b * a;
        }
        return adj;
    }

private:
    struct Node {
        double value;
        Index parent_a, parent_b;
        double partial_a, partial_b;
    };

    Index push(double value, Index a, Index b, double pa, double pb) {
        nodes_.push_back({value, a, b, pa, pb});
        return static_cast<Index>(nodes_.size() - 1);
    }

    std::vector<Node> nodes_;
};

}  // namespace uniqode::ad

#endif
