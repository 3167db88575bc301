#include "sclreg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "sclreg/errors.hpp"
#include "sclreg/field_io.hpp"
#include "sclreg/kernels.hpp"
#include "sclreg/rng.hpp"
#include "sclreg/spectral.hpp"

namespace sclreg {
namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// RFC-4180: quote a field when it contains a comma, quote or line break.
std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string join_ids(const std::vector<std::size_t>& ids) {
    std::string out;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (k > 0)
            out += ';';
        out += std::to_string(ids[k]);
    }
    return out;
}

// Splits one CSV line into fields, honoring RFC-4180 quoting.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < line.size() && line[k + 1] == '"') {
                    cur += '"';
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted)
        throw FormatError("CSV line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(cur);
    return fields;
}

double parse_double_field(const std::string& s, std::size_t line_no, const char* name) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw FormatError("CSV line " + std::to_string(line_no) + ": bad " + name + " value '" +
                          s + "'");
    return v;
}

std::size_t parse_size_field(const std::string& s, std::size_t line_no, const char* name) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw FormatError("CSV line " + std::to_string(line_no) + ": bad " + name + " value '" +
                          s + "'");
    return static_cast<std::size_t>(v);
}

// Continued-fraction core of the incomplete beta (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny)
        d = tiny;
    d = 1.0 / d;
    double f = d;
    for (int m = 1; m <= 300; ++m) {
        const double dm = static_cast<double>(m);
        double num = dm * (b - dm) * x / ((qam + 2.0 * dm) * (a + 2.0 * dm));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        f *= d * c;
        num = -(a + dm) * (qab + dm) * x / ((a + 2.0 * dm) * (qap + 2.0 * dm));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        f *= delta;
        if (std::abs(delta - 1.0) < eps)
            return f;
    }
    throw Error("incomplete beta continued fraction did not converge");
}

} // namespace

void ExperimentConfig::validate() const {
    if (image_height == 0 || image_width == 0)
        throw ArgumentError("experiment: image dimensions must be positive");
    if (n_images < 2)
        throw ArgumentError("experiment: need at least two images (one train, one test)");
    if (snr_db_list.empty())
        throw ArgumentError("experiment: snr_db_list is empty");
    for (double s : snr_db_list)
        if (!std::isfinite(s))
            throw ArgumentError("experiment: snr_db entries must be finite");
    if (lambda_list.empty())
        throw ArgumentError("experiment: lambda_list is empty");
    for (double l : lambda_list)
        if (!std::isfinite(l) || l < 0.0)
            throw ArgumentError("experiment: lambda entries must be finite and nonnegative");
    if (train_sizes.empty())
        throw ArgumentError("experiment: train_sizes is empty");
    for (std::size_t t : train_sizes) {
        if (t == 0)
            throw ArgumentError("experiment: train sizes must be positive");
        if (t >= n_images)
            throw ArgumentError("experiment: train size " + std::to_string(t) +
                                " leaves no test images out of " + std::to_string(n_images));
    }
    if (repetitions == 0)
        throw ArgumentError("experiment: repetitions must be positive");
    if (kernel_spec.height != image_height || kernel_spec.width != image_width)
        throw ArgumentError("experiment: kernel shape must match the image shape");
    if (!std::isfinite(texture_correlation_length) || texture_correlation_length < 0.0)
        throw ArgumentError("experiment: texture_correlation_length must be finite and "
                            "nonnegative");
    if (!(solver.tolerance > 0.0) || !std::isfinite(solver.tolerance))
        throw ArgumentError("experiment: solver tolerance must be positive and finite");
    if (solver.max_iterations == 0)
        throw ArgumentError("experiment: solver iteration budget must be positive");
}

double mse(const ImageGrid& predicted, const ImageGrid& target) {
    if (!predicted.same_shape(target))
        throw ArgumentError("mse: shapes differ");
    const double ss = kern::active_ops().sum_sq_diff(predicted.data(), target.data(),
                                                     predicted.size());
    return ss / static_cast<double>(predicted.size());
}

double noise_floor(double snr_db, const std::vector<ImageGrid>& clean_test_outputs) {
    if (clean_test_outputs.empty())
        throw ArgumentError("noise_floor: no test outputs");
    double total = 0.0;
    for (const ImageGrid& img : clean_test_outputs) {
        const double sigma = snr_to_sigma(img, snr_db);
        total += sigma * sigma;
    }
    return total / static_cast<double>(clean_test_outputs.size());
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config) {
    config.validate();
    const std::size_t h = config.image_height, w = config.image_width;
    const ImageGrid true_kernel = make_zero_sum_kernel(config.kernel_spec);
    const double clip_lo = 2.0 * min_value(true_kernel);
    const double clip_hi = 2.0 * max_value(true_kernel);

    std::vector<ImageGrid> textures;
    textures.reserve(config.n_images);
    for (std::size_t i = 0; i < config.n_images; ++i)
        textures.push_back(make_texture(h, w, derive_seed(config.base_seed, {1, i}),
                                        config.texture_correlation_length));

    const DftPlan plan(h, w);
    std::vector<ExperimentRecord> records;
    records.reserve(config.snr_db_list.size() * config.train_sizes.size() * config.repetitions *
                    config.lambda_list.size());

    for (std::size_t si = 0; si < config.snr_db_list.size(); ++si) {
        const double snr_db = config.snr_db_list[si];
        for (std::size_t ti = 0; ti < config.train_sizes.size(); ++ti) {
            const std::size_t train_size = config.train_sizes[ti];
            for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
                // Noisy outputs for every image of this cell; training uses a
                // random subset, the rest is held out.
                const NoiseSpec noise{snr_db, derive_seed(config.base_seed, {2, si, ti, rep})};
                const Dataset data = make_dataset_full(textures, true_kernel, noise);

                std::vector<std::size_t> ids(config.n_images);
                std::iota(ids.begin(), ids.end(), std::size_t{0});
                Rng split_rng(derive_seed(config.base_seed, {3, si, ti, rep}));
                for (std::size_t k = 0; k < train_size; ++k)
                    std::swap(ids[k], ids[k + split_rng.below(config.n_images - k)]);
                std::vector<std::size_t> train_ids(ids.begin(),
                                                   ids.begin() + static_cast<long>(train_size));
                std::vector<std::size_t> test_ids(ids.begin() + static_cast<long>(train_size),
                                                  ids.end());
                std::sort(train_ids.begin(), train_ids.end());
                std::sort(test_ids.begin(), test_ids.end());

                SufficientStatistics stats(h, w);
                for (std::size_t id : train_ids)
                    stats.accumulate(data.pairs[id].first, data.pairs[id].second, plan);

                std::vector<ImageGrid> clean_test;
                clean_test.reserve(test_ids.size());
                for (std::size_t id : test_ids)
                    clean_test.push_back(data.clean_outputs[id]);
                const double floor = noise_floor(snr_db, clean_test);

                for (double lambda : config.lambda_list) {
                    ExperimentRecord rec;
                    rec.snr_db = snr_db;
                    rec.lambda = lambda;
                    rec.train_size = train_size;
                    rec.repetition = rep;
                    rec.noise_floor = floor;
                    rec.train_image_ids = train_ids;
                    try {
                        const KernelEstimate fit =
                            solve_regularized(stats, lambda, config.solver);
                        double err_noisy = 0.0, err_clean = 0.0;
                        for (std::size_t id : test_ids) {
                            const ImageGrid pred =
                                circ_convolve(data.pairs[id].first, fit.kernel, plan);
                            err_noisy += mse(pred, data.pairs[id].second);
                            err_clean += mse(pred, data.clean_outputs[id]);
                        }
                        rec.test_mse = err_noisy / static_cast<double>(test_ids.size());
                        rec.test_mse_clean = err_clean / static_cast<double>(test_ids.size());
                        rec.log10_mse = std::log10(rec.test_mse);
                        rec.clipped_fraction = clipped_fraction(fit.kernel, clip_lo, clip_hi);
                        rec.solver_iterations = fit.iterations;
                        rec.converged = fit.converged;
                    } catch (const SolverError&) {
                        const double nan = std::numeric_limits<double>::quiet_NaN();
                        rec.test_mse = nan;
                        rec.log10_mse = nan;
                        rec.test_mse_clean = nan;
                        rec.clipped_fraction = nan;
                        rec.solver_iterations = config.solver.max_iterations;
                        rec.converged = false;
                    }
                    records.push_back(std::move(rec));
                }
            }
        }
    }
    return records;
}

TTestResult paired_t_test(const std::vector<double>& errors_a,
                          const std::vector<double>& errors_b) {
    if (errors_a.size() != errors_b.size())
        throw ArgumentError("paired_t_test: sample sizes differ");
    const std::size_t n = errors_a.size();
    if (n < 2)
        throw ArgumentError("paired_t_test: need at least two pairs");
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k)
        d[k] = errors_a[k] - errors_b[k];
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : d)
        ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    TTestResult res;
    if (sd == 0.0) {
        res.degenerate = true;
        res.t = mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity() *
                                        (mean > 0.0 ? 1.0 : -1.0);
        res.p_two_sided = mean == 0.0 ? 1.0 : 0.0;
        return res;
    }
    res.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    const double nu = static_cast<double>(n - 1);
    const double x = nu / (nu + res.t * res.t);
    res.p_two_sided = std::clamp(regularized_incomplete_beta(nu / 2.0, 0.5, x), 0.0, 1.0);
    return res;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ArgumentError("regularized_incomplete_beta: a and b must be positive");
    if (!(x >= 0.0) || !(x <= 1.0))
        throw ArgumentError("regularized_incomplete_beta: x must lie in [0, 1]");
    if (x == 0.0)
        return 0.0;
    if (x == 1.0)
        return 1.0;
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                  a * std::log(x) + b * std::log1p(-x));
    // The continued fraction converges fast only on one side of the mean;
    // use the reflection I_x(a,b) = 1 - I_{1-x}(b,a) on the other.
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_cont_frac(a, b, x) / a;
    return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

std::string csv_header() {
    return "snr_db,lambda,train_size,repetition,test_mse,log10_mse,test_mse_clean,"
           "noise_floor,clipped_fraction,solver_iterations,converged,train_image_ids";
}

void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << csv_header() << "\n";
    for (const ExperimentRecord& r : records) {
        out << csv_quote(fmt_double(r.snr_db)) << ',' << csv_quote(fmt_double(r.lambda)) << ','
            << r.train_size << ',' << r.repetition << ',' << csv_quote(fmt_double(r.test_mse))
            << ',' << csv_quote(fmt_double(r.log10_mse)) << ','
            << csv_quote(fmt_double(r.test_mse_clean)) << ','
            << csv_quote(fmt_double(r.noise_floor)) << ','
            << csv_quote(fmt_double(r.clipped_fraction)) << ',' << r.solver_iterations << ','
            << (r.converged ? 1 : 0) << ',' << csv_quote(join_ids(r.train_image_ids)) << "\n";
    }
    out.flush();
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

std::vector<ExperimentRecord> parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line))
        throw FormatError("'" + path + "': empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != csv_header())
        throw FormatError("'" + path + "': unexpected CSV header");

    std::vector<ExperimentRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const std::vector<std::string> f = split_csv_line(line, line_no);
        if (f.size() != 12)
            throw FormatError("CSV line " + std::to_string(line_no) + ": expected 12 fields, got " +
                              std::to_string(f.size()));
        ExperimentRecord r;
        r.snr_db = parse_double_field(f[0], line_no, "snr_db");
        r.lambda = parse_double_field(f[1], line_no, "lambda");
        r.train_size = parse_size_field(f[2], line_no, "train_size");
        r.repetition = parse_size_field(f[3], line_no, "repetition");
        r.test_mse = parse_double_field(f[4], line_no, "test_mse");
        r.log10_mse = parse_double_field(f[5], line_no, "log10_mse");
        r.test_mse_clean = parse_double_field(f[6], line_no, "test_mse_clean");
        r.noise_floor = parse_double_field(f[7], line_no, "noise_floor");
        r.clipped_fraction = parse_double_field(f[8], line_no, "clipped_fraction");
        r.solver_iterations = parse_size_field(f[9], line_no, "solver_iterations");
        const std::size_t conv = parse_size_field(f[10], line_no, "converged");
        if (conv > 1)
            throw FormatError("CSV line " + std::to_string(line_no) +
                              ": converged must be 0 or 1");
        r.converged = conv == 1;
        if (!f[11].empty()) {
            std::stringstream ids(f[11]);
            std::string tok;
            while (std::getline(ids, tok, ';'))
                r.train_image_ids.push_back(parse_size_field(tok, line_no, "train_image_ids"));
        }
        records.push_back(std::move(r));
    }
    return records;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");

    ExperimentConfig config;
    bool have_kernel_h = false, have_kernel_w = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.resize(hash);
        const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
        std::size_t begin = 0, end = line.size();
        while (begin < end && is_space(line[begin]))
            ++begin;
        while (end > begin && is_space(line[end - 1]))
            --end;
        if (begin == end)
            continue;
        const std::string entry = line.substr(begin, end - begin);
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw FormatError("'" + path + "' line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        std::string key = entry.substr(0, eq);
        std::string value = entry.substr(eq + 1);
        while (!key.empty() && is_space(key.back()))
            key.pop_back();
        for (char& c : value)
            if (c == ',')
                c = ' ';

        std::stringstream vs(value);
        const auto one_double = [&](const char* name) {
            double v = 0.0;
            std::string extra;
            if (!(vs >> v) || (vs >> extra))
                throw FormatError("'" + path + "' line " + std::to_string(line_no) +
                                  ": expected one number for " + name);
            return v;
        };
        const auto one_size = [&](const char* name) {
            const double v = one_double(name);
            if (v < 0.0 || v != std::floor(v))
                throw FormatError("'" + path + "' line " + std::to_string(line_no) + ": " + name +
                                  " must be a nonnegative integer");
            return static_cast<std::size_t>(v);
        };
        const auto double_list = [&](const char* name) {
            std::vector<double> out;
            double v = 0.0;
            while (vs >> v)
                out.push_back(v);
            if (!vs.eof() || out.empty())
                throw FormatError("'" + path + "' line " + std::to_string(line_no) +
                                  ": expected numbers for " + name);
            return out;
        };

        if (key == "image_height") {
            config.image_height = one_size(key.c_str());
        } else if (key == "image_width") {
            config.image_width = one_size(key.c_str());
        } else if (key == "n_images") {
            config.n_images = one_size(key.c_str());
        } else if (key == "snr_db_list") {
            config.snr_db_list = double_list(key.c_str());
        } else if (key == "lambda_list") {
            config.lambda_list = double_list(key.c_str());
        } else if (key == "train_sizes") {
            config.train_sizes.clear();
            for (double v : double_list(key.c_str())) {
                if (v < 0.0 || v != std::floor(v))
                    throw FormatError("'" + path + "' line " + std::to_string(line_no) +
                                      ": train_sizes entries must be nonnegative integers");
                config.train_sizes.push_back(static_cast<std::size_t>(v));
            }
        } else if (key == "repetitions") {
            config.repetitions = one_size(key.c_str());
        } else if (key == "base_seed") {
            unsigned long long v = 0;
            std::string extra;
            if (!(vs >> v) || (vs >> extra))
                throw FormatError("'" + path + "' line " + std::to_string(line_no) +
                                  ": base_seed must be a nonnegative integer");
            config.base_seed = v;
        } else if (key == "kernel_height") {
            config.kernel_spec.height = one_size(key.c_str());
            have_kernel_h = true;
        } else if (key == "kernel_width") {
            config.kernel_spec.width = one_size(key.c_str());
            have_kernel_w = true;
        } else if (key == "kernel_r_positive") {
            config.kernel_spec.r_positive = one_double(key.c_str());
        } else if (key == "kernel_r_inner") {
            config.kernel_spec.r_inner = one_double(key.c_str());
        } else if (key == "kernel_r_outer") {
            config.kernel_spec.r_outer = one_double(key.c_str());
        } else if (key == "texture_correlation_length") {
            config.texture_correlation_length = one_double(key.c_str());
        } else if (key == "solver_tolerance") {
            config.solver.tolerance = one_double(key.c_str());
        } else if (key == "solver_max_iterations") {
            config.solver.max_iterations = one_size(key.c_str());
        } else {
            throw FormatError("'" + path + "' line " + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
        }
    }
    if (!have_kernel_h)
        config.kernel_spec.height = config.image_height;
    if (!have_kernel_w)
        config.kernel_spec.width = config.image_width;
    return config;
}

} // namespace sclreg
