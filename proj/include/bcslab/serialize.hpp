#pragma once

// JSON views of the result types emitted by the command line tool. Every
// top-level object carries "schema": 1; numbers that come with a tolerance
// or tail bound keep it next to the value.

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "bcslab/bdg.hpp"
#include "bcslab/cert.hpp"
#include "bcslab/decomp.hpp"
#include "bcslab/entropy.hpp"
#include "bcslab/kernels.hpp"
#include "bcslab/tibcs.hpp"

namespace bcslab::serialize {

inline constexpr int kSchemaVersion = 1;

nlohmann::json potential_json(const foundation::Potential& v);
nlohmann::json radial_grid_json(const foundation::RadialGrid& g);
nlohmann::json box_grid_json(const foundation::BoxGrid& b);

nlohmann::json gap_solution_json(const tibcs::GapSolution& sol,
                                 const foundation::RadialGrid& grid, double tol);
std::string gap_solution_csv(const tibcs::GapSolution& sol, const tibcs::TiState& state,
                             const foundation::RadialGrid& grid);

nlohmann::json suite_report_json(const entropy::SuiteReport& rep, double floor);
nlohmann::json kernel_eval_json(const kernels::KernelEval& eval);
nlohmann::json series_eval_json(const kernels::SeriesEval& eval, const std::string& method,
                                const nlohmann::json& inputs);
nlohmann::json norm_scaling_json(const kernels::NormScalingResult& res);
nlohmann::json bdg_scaling_json(const bdg::BdgScalingResult& res);
nlohmann::json certificate_json(const cert::Certificate& c);
nlohmann::json apriori_json(const cert::AprioriResult& res);
nlohmann::json ktv_json(const cert::KtvFormBound& kb);
nlohmann::json split_bounds_json(const decomp::SplitBounds& sb);

// Binary pair-field file: magic "BCSPF01\0", u32 dims, u32 n, f64 L, f64 h,
// then n^dims x n^dims complex64 entries (float32 re, float32 im),
// row-major in the x index, little-endian.
void write_pair_field(const std::string& path, const decomp::PairField& field);
decomp::PairField read_pair_field(const std::string& path);

// Binary block-state file: magic "BCSBS01\0", u32 half-dimension M, then
// 2M x 2M complex128 entries row-major, little-endian.
void write_block_state(const std::string& path, const entropy::BlockState& state);
entropy::BlockState read_block_state(const std::string& path);

}  // namespace bcslab::serialize
