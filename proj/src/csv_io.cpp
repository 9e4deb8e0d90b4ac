#include "geofield/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "geofield/errors.hpp"

namespace geofield {

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_slice_csv(std::ostream& stream, const TemperatureField& field, const FieldSlice& slice, int time_stride) {
    if (time_stride < 1) time_stride = 1;
    stream << "x,y,z,t,temperature_K\n";
    std::string out;
    const int last = static_cast<int>(slice.steps.size()) - 1;
    const std::string z = format_value(slice.z);
    for (int n = 0; n <= last; ++n) {
        if (n % time_stride != 0 && n != last) continue;
        const std::string t = format_value(field.time.t(n));
        const auto& values = slice.steps[n];
        for (std::size_t i = 0; i < field.x.size(); ++i) {
            const std::string x = format_value(field.x[i]);
            for (std::size_t j = 0; j < field.y.size(); ++j) {
                out += x;
                out += ',';
                out += format_value(field.y[j]);
                out += ',';
                out += z;
                out += ',';
                out += t;
                out += ',';
                out += format_value(values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
                out += '\n';
            }
        }
        stream << out;
        out.clear();
    }
}

std::string slice_csv(const TemperatureField& field, const FieldSlice& slice, int time_stride) {
    std::ostringstream ss;
    write_slice_csv(ss, field, slice, time_stride);
    return ss.str();
}

void write_slice_file(const std::filesystem::path& path, const TemperatureField& field, const FieldSlice& slice,
                      int time_stride) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    write_slice_csv(f, field, slice, time_stride);
    f.close();
    if (!f) throw IoError("failed writing " + path.string());
}

std::string relative_error_csv(std::span<const double> errors, const TimeGrid& time) {
    std::string out = "n,t_days,err\n";
    for (std::size_t k = 0; k < errors.size(); ++k) {
        const int n = static_cast<int>(k) + 1;
        out += std::to_string(n) + "," + format_value(time.t(n)) + "," + format_value(errors[k]) + "\n";
    }
    return out;
}

std::string trace_csv(const OptimizationTrace& trace) {
    std::string out = "iteration,objective,gradient_norm,step_length,move,accepted_objective,active,points";
    const std::size_t count = trace.initial.count();
    for (std::size_t l = 0; l < count; ++l) {
        out += ",x" + std::to_string(l) + ",y" + std::to_string(l);
    }
    out += '\n';
    for (const auto& r : trace.iterations) {
        out += std::to_string(r.iteration) + "," + format_value(r.objective) + "," + format_value(r.gradient_norm) +
               "," + format_value(r.step_length) + "," + format_value(r.move) + "," +
               format_value(r.accepted_objective) + "," + std::to_string(r.active.size()) + "," +
               std::to_string(r.point_count);
        for (double c : r.placement.coords) out += "," + format_value(c);
        out += '\n';
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) throw IoError("failed writing " + path.string());
}

std::string slice_file_name(const std::string& prefix, double z) {
    return prefix + "_z" + format_value(z) + ".csv";
}

}  // namespace geofield
