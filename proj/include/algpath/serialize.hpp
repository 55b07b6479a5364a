#ifndef ALGPATH_SERIALIZE_HPP
#define ALGPATH_SERIALIZE_HPP

#include <json.hpp>

#include "algpath/tracker.hpp"

namespace algpath {

using json = nlohmann::json;

template <class N>
json to_json(const CPoint<N>& p) {
    using S = ScalarOps<N>;
    return json::array({S::to_double(p.re), S::to_double(p.im)});
}

template <class N>
json to_json(const PointVec<N>& v) {
    json arr = json::array();
    for (const auto& p : v) arr.push_back(to_json(p));
    return arr;
}

// {"x": [[re,im],...], "r": r, "A": [[[re,im],...],...], "rho": rho}
template <class N>
json to_json(const MooreBox<N>& box) {
    using S = ScalarOps<N>;
    json a_rows = json::array();
    for (std::size_t i = 0; i < box.A.n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < box.A.n; ++j) row.push_back(to_json(box.A.at(i, j)));
        a_rows.push_back(row);
    }
    return json{{"x", to_json(box.x)}, {"r", S::to_double(box.r)}, {"A", a_rows}, {"rho", box.rho}};
}

template <class N>
MooreBox<N> moore_box_from_json(const json& j) {
    using S = ScalarOps<N>;
    MooreBox<N> box;
    for (const auto& p : j.at("x"))
        box.x.push_back({S::from_double(p.at(0).get<double>()), S::from_double(p.at(1).get<double>())});
    box.r = S::from_double(j.at("r").get<double>());
    box.rho = j.value("rho", 7.0 / 8.0);
    const auto& rows = j.at("A");
    box.A = PointMat<N>(box.x.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k)
            box.A.at(i, k) = {S::from_double(rows[i][k].at(0).get<double>()),
                              S::from_double(rows[i][k].at(1).get<double>())};
    return box;
}

inline std::vector<std::complex<double>> point_from_json(const json& j) {
    std::vector<std::complex<double>> out;
    for (const auto& p : j.at("point"))
        out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return out;
}

}  // namespace algpath

#endif
