#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "geofield/field.hpp"
#include "geofield/optimizer.hpp"

namespace geofield {

/// One number as printf "%.9g".
std::string format_value(double v);

/// Header `x,y,z,t,temperature_K`, rows ordered by time node, then i, then j.  Every
/// `time_stride`-th node is written, always including the last.
void write_slice_csv(std::ostream& out, const TemperatureField& field, const FieldSlice& slice, int time_stride = 1);
std::string slice_csv(const TemperatureField& field, const FieldSlice& slice, int time_stride = 1);

/// Streams the slice to `path`.  Throws IoError.
void write_slice_file(const std::filesystem::path& path, const TemperatureField& field, const FieldSlice& slice,
                      int time_stride = 1);

/// Header `n,t_days,err`; errors[n - 1] belongs to time node n.
std::string relative_error_csv(std::span<const double> errors, const TimeGrid& time);

/// One row per iteration: objective, gradient norm, step, move, active count and the centres.
std::string trace_csv(const OptimizationTrace& trace);

/// Writes bytes verbatim (binary mode, so LF stays LF).  Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& content);

/// Slice file name such as `fd_z20.csv`.
std::string slice_file_name(const std::string& prefix, double z);

}  // namespace geofield
