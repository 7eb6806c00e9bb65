#include "parnewt/field.hpp"

#include <stdexcept>

#include "parnewt/csv.hpp"

namespace parnewt {

SpaceTimeField::SpaceTimeField(GridPtr grid, Eigen::ArrayXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->node_count())
        throw std::invalid_argument("field: value array does not match the grid");
}

SpaceTimeField SpaceTimeField::with_zero_boundary() const {
    SpaceTimeField out = *this;
    const int n = grid_->node_count();
    for (int i = 0; i < n; ++i)
        if (grid_->on_parabolic_boundary(i)) out.values_[i] = 0.0;
    return out;
}

double SpaceTimeField::boundary_max_abs() const {
    double m = 0.0;
    const int n = grid_->node_count();
    for (int i = 0; i < n; ++i)
        if (grid_->on_parabolic_boundary(i)) m = std::max(m, std::abs(values_[i]));
    return m;
}

SpaceTimeField& SpaceTimeField::operator+=(const SpaceTimeField& o) {
    values_ += o.values_;
    return *this;
}
SpaceTimeField& SpaceTimeField::operator-=(const SpaceTimeField& o) {
    values_ -= o.values_;
    return *this;
}
SpaceTimeField& SpaceTimeField::operator*=(double s) {
    values_ *= s;
    return *this;
}

SpaceTimeField sample(GridPtr grid, const std::function<double(const double*, double)>& f) {
    SpaceTimeField out(grid);
    const Grid& g = *grid;
    for (int k = 0; k < g.steps(); ++k) {
        const double t = g.time(k);
        for (int s = 0; s < g.space_count(); ++s) {
            const auto x = g.space_coords(s);
            out(g.index(s, k)) = f(x.data(), t);
        }
    }
    return out;
}

void write_field_csv(const SpaceTimeField& field, const std::string& path) {
    const Grid& g = field.grid();
    CsvWriter csv(path);
    if (g.dim() == 1)
        csv.header({"x1", "t", "u"});
    else
        csv.header({"x1", "x2", "t", "u"});
    for (int k = 0; k < g.steps(); ++k) {
        for (int s = 0; s < g.space_count(); ++s) {
            const auto x = g.space_coords(s);
            if (g.dim() == 1)
                csv.row({x[0], g.time(k), field.at(s, k)});
            else
                csv.row({x[0], x[1], g.time(k), field.at(s, k)});
        }
    }
}

}  // namespace parnewt
