#pragma once

#include <optional>
#include <string>
#include <vector>

namespace chaincalc {

// Finite weighted metric space: a full symmetric distance matrix plus a
// nonnegative mass per point. Immutable after construction/validation;
// algorithms never look at coords (they exist for generators and file output).
struct PointCloudSpace {
    int n = 0;
    std::vector<double> dist;                 // row-major n*n
    std::vector<double> mass;                 // size n, >= 0, positive total
    std::vector<std::string> labels;          // optional point ids (size n or empty)
    std::vector<std::vector<double>> coords;  // optional embedding (size n or empty)

    double d(int i, int j) const { return dist[static_cast<size_t>(i) * n + j]; }
    double& d_mut(int i, int j) { return dist[static_cast<size_t>(i) * n + j]; }
    double total_mass() const;
    double diameter() const;
    // smallest positive pairwise distance; 0 when n < 2
    double min_positive_distance() const;
    // resolve a point given either a label or a decimal index
    int resolve(const std::string& token) const;
    std::string label_of(int i) const;
};

struct EpsilonGraph {
    double eps = 0.0;
    struct Edge {
        int to;
        double length;
    };
    // neighbors j with 0 < d(i,j) <= eps, sorted by id
    std::vector<std::vector<Edge>> adjacency;
};

struct ComponentPartition {
    double eps = 0.0;
    std::vector<int> component_of;        // size n
    std::vector<std::vector<int>> components; // each sorted; ordered by least id
};

struct DoublingReport {
    double constant = 1.0;   // max over centers/radii of m(B_2r)/m(B_r)
    int skipped = 0;         // (center, radius) pairs with massless inner ball
    int witness_center = -1;
    double witness_radius = 0.0;
};

// Throws on any metric/mass defect. Triangle inequality is checked on every
// triple for n <= 300 and on 10^6 seeded random triples above that, with
// 1e-12 absolute + 1e-9 relative tolerance.
void validate_space(const PointCloudSpace& space);

EpsilonGraph build_epsilon_graph(const PointCloudSpace& space, double eps);

ComponentPartition chain_components(const PointCloudSpace& space, double eps);

// Distances raised to the power alpha in (0,1); masses and coords unchanged.
PointCloudSpace snowflake(const PointCloudSpace& space, double alpha);

// Mass of the open ball {z : d(center, z) < r}; the closed variant is used
// only where a sup over a closed ball is called for.
double open_ball_mass(const PointCloudSpace& space, int center, double r);
double closed_ball_mass(const PointCloudSpace& space, int center, double r);
std::vector<int> open_ball_members(const PointCloudSpace& space, int center, double r);

DoublingReport doubling_constant(const PointCloudSpace& space,
                                 const std::vector<double>& radii);

// All pairwise distances that occur (distinct, ascending, positive); the
// default radius/critical-scale grid for audits.
std::vector<double> distance_scales(const PointCloudSpace& space);

// --- generators -----------------------------------------------------------

// Uniform grid of side_count points per axis with the given spacing; every
// point carries mass spacing^dim.
PointCloudSpace generate_grid(int dim, int side_count, double spacing);

// Points x_n = n and y_n = n + 1/n for n in [n_min, n_max], each with mass
// n^-3; labels "x<n>" / "y<n>".
PointCloudSpace generate_two_sequence(int n_min, int n_max);

// Grid with the masses of the listed points set to zero.
PointCloudSpace generate_punctured_grid(int dim, int side_count, double spacing,
                                        const std::vector<int>& punctures);

// Parse "grid:dim,side,spacing", "two_sequence:nmin,nmax",
// "punctured_grid:dim,side,spacing,id1;id2;...".
PointCloudSpace generate_space(const std::string& descriptor);

} // namespace chaincalc
