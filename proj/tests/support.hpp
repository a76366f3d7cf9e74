#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "spmid/io.hpp"
#include "spmid/params.hpp"

namespace spmid::testing {

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::abs(want);
}

// LCO cell used for synthetic data.
inline PhysicalParams lco_physical() {
    PhysicalParams p;
    p.negative = {73.5e-6, 12.5e-6, 0.4382, 5.5e-14, 1.764e-11, 30555};
    p.positive = {70.0e-6, 8.5e-6, 0.3000, 1.0e-11, 6.667e-11, 51555};
    p.area = 0.0982;
    p.c_electrolyte = 1000;
    return p;
}

inline std::filesystem::path data_file(const std::string& name) {
    return std::filesystem::path(SPMID_DATA_DIR) / name;
}

inline io::OcvPair fixture_ocv() { return io::read_ocv_csv(data_file("lco_ocv.csv")); }

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("spmid_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace spmid::testing
