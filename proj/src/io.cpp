#include "fermitree/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fermitree {
namespace io {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io: cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io: cannot write " + path);
    out << j.dump(2) << "\n";
}

Lattice lattice_from(const json& j) { return Lattice(j.at("torus_dims").get<std::vector<int>>()); }

}  // namespace

grassmann::Covariance load_covariance(const std::string& path) {
    json j = read_json(path);
    Lattice torus = lattice_from(j);
    const int spins = j.at("spins").get<int>();
    const int axes = torus.axes();
    const std::size_t sites = static_cast<std::size_t>(torus.sites());
    std::vector<Complex> hat(sites * spins * spins, Complex{});
    for (const auto& row : j.at("table")) {
        if (static_cast<int>(row.size()) != 2 + axes + 2)
            throw std::runtime_error("io: covariance row arity mismatch in " + path);
        int s = row[0].get<int>(), s2 = row[1].get<int>();
        std::vector<int> p(axes);
        for (int a = 0; a < axes; ++a) p[a] = row[2 + a].get<int>();
        double re = row[2 + axes].get<double>(), im = row[3 + axes].get<double>();
        hat[(std::size_t(s) * spins + s2) * sites + torus.flatten(p)] = Complex(re, im);
    }
    return grassmann::Covariance::from_hat(std::move(torus), spins, std::move(hat));
}

void save_covariance(const grassmann::Covariance& c, const std::string& path) {
    json rows = json::array();
    const auto& torus = c.torus();
    const int sites = static_cast<int>(torus.sites());
    for (int s = 0; s < c.spins(); ++s)
        for (int s2 = 0; s2 < c.spins(); ++s2)
            for (int p = 0; p < sites; ++p) {
                Complex v = c.hat(s, s2, p);
                if (v == Complex{}) continue;
                json row = json::array({s, s2});
                for (int comp : torus.unflatten(p)) row.push_back(comp);
                row.push_back(v.real());
                row.push_back(v.imag());
                rows.push_back(std::move(row));
            }
    write_json({{"schema_version", kSchemaVersion},
                {"torus_dims", torus.dims},
                {"spins", c.spins()},
                {"table", rows}},
               path);
}

grassmann::InteractionKernel load_kernel(const std::string& path) {
    json j = read_json(path);
    Lattice torus = lattice_from(j);
    const int spins = j.at("spins").get<int>();
    const int arity = j.at("arity").get<int>();
    const int axes = torus.axes();
    grassmann::DenseKernel hat(arity, static_cast<int>(torus.sites()) * spins);
    std::vector<int> args(arity), p(axes);
    for (const auto& row : j.at("table")) {
        if (static_cast<int>(row.size()) != arity + arity * axes + 2)
            throw std::runtime_error("io: kernel row arity mismatch in " + path);
        for (int i = 0; i < arity; ++i) {
            int sigma = row[i].get<int>();
            for (int a = 0; a < axes; ++a) p[a] = row[arity + i * axes + a].get<int>();
            args[i] = torus.flatten(p) * spins + sigma;
        }
        double re = row[arity + arity * axes].get<double>();
        double im = row[arity + arity * axes + 1].get<double>();
        hat.at(args) = Complex(re, im);
    }
    return grassmann::InteractionKernel(std::move(torus), spins, std::move(hat));
}

void save_kernel(const grassmann::InteractionKernel& k, const std::string& path) {
    json rows = json::array();
    const auto& torus = k.torus();
    const int spins = k.spins();
    const int n = k.arity();
    const std::size_t total = k.hat().values.size();
    const int points = k.hat().points;
    std::vector<int> args(n);
    for (std::size_t flat = 0; flat < total; ++flat) {
        Complex v = k.hat().values[flat];
        if (v == Complex{}) continue;
        std::size_t rest = flat;
        for (int i = n - 1; i >= 0; --i) {
            args[i] = static_cast<int>(rest % points);
            rest /= points;
        }
        json row = json::array();
        for (int i = 0; i < n; ++i) row.push_back(args[i] % spins);
        for (int i = 0; i < n; ++i)
            for (int comp : torus.unflatten(args[i] / spins)) row.push_back(comp);
        row.push_back(v.real());
        row.push_back(v.imag());
        rows.push_back(std::move(row));
    }
    write_json({{"schema_version", kSchemaVersion},
                {"torus_dims", torus.dims},
                {"spins", spins},
                {"arity", n},
                {"table", rows}},
               path);
}

trees::Tree load_tree(const std::string& path) {
    json j = read_json(path);
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    return trees::Tree(j.at("m").get<int>(), std::move(edges));
}

void save_tree(const trees::Tree& t, const std::string& path) {
    json edges = json::array();
    for (auto [a, b] : t.edges) edges.push_back(json::array({a, b}));
    write_json({{"m", t.m}, {"edges", edges}}, path);
}

std::string tree_id(const trees::Tree& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.edges.size(); ++i) {
        if (i) os << ",";
        os << t.edges[i].first << "-" << t.edges[i].second;
    }
    return t.edges.empty() ? "single" : os.str();
}

ProblemBundle load_problem(const std::string& path) {
    json j = read_json(path);
    auto dir = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& ref) { return (dir / ref).string(); };

    ProblemBundle bundle;
    bundle.covariance = std::make_unique<grassmann::Covariance>(
        load_covariance(resolve(j.at("covariance_ref").get<std::string>())));
    for (const auto& [arity_str, ref] : j.at("kernels_ref").items())
        bundle.kernels.emplace(std::stoi(arity_str), load_kernel(resolve(ref.get<std::string>())));

    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("tree").at("edges"))
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    trees::Tree tree(j.at("tree").at("m").get<int>(), std::move(edges));
    auto rooted = trees::root_tree(tree, j.at("root").get<int>());

    std::vector<int> n_per_vertex{0};
    for (const auto& n : j.at("n_per_vertex")) n_per_vertex.push_back(n.get<int>());

    std::vector<const grassmann::InteractionKernel*> kernels(tree.m + 1, nullptr);
    for (int l = 1; l <= tree.m; ++l) {
        auto it = bundle.kernels.find(n_per_vertex[l]);
        if (it == bundle.kernels.end())
            throw std::runtime_error("io: no kernel of arity " + std::to_string(n_per_vertex[l]));
        kernels[l] = &it->second;
    }

    const auto& torus = bundle.covariance->torus();
    std::vector<amplitude::Leg> external;
    std::vector<int> p(torus.axes());
    for (const auto& leg : j.at("external_legs")) {
        for (int a = 0; a < torus.axes(); ++a) p[a] = leg[a].get<int>();
        external.push_back({torus.flatten(p), leg[torus.axes()].get<int>()});
    }

    bundle.problem = std::make_unique<amplitude::AmplitudeProblem>(
        std::move(rooted), std::move(n_per_vertex), bundle.covariance.get(), std::move(kernels),
        std::move(external));
    return bundle;
}

std::string bound_report_json(const bounds::BoundReport& row) {
    json j{{"schema_version", kSchemaVersion},
           {"tree", row.tree_id},
           {"n_per_vertex", row.n_per_vertex},
           {"external_legs", row.external_legs},
           {"branch_excess", row.branch_excess},
           {"perturbative", row.perturbative},
           {"standard", row.standard},
           {"theorem1", row.theorem1},
           {"bound_only", row.bound_only},
           {"domination_ok", row.domination_ok}};
    if (row.theorem2) j["theorem2"] = *row.theorem2;
    if (row.loop) j["loop"] = *row.loop;
    if (row.amplitude_abs) j["amplitude_abs"] = *row.amplitude_abs;
    return j.dump();
}

std::string bound_report_csv_header() {
    return "tree,n_per_vertex,external_legs,branch_excess,perturbative,standard,theorem1,"
           "theorem2,loop,amplitude_abs,bound_only,domination_ok";
}

std::string bound_report_csv(const bounds::BoundReport& row) {
    std::ostringstream os;
    os << '"' << row.tree_id << "\",\"";
    for (std::size_t i = 1; i < row.n_per_vertex.size(); ++i) {
        if (i > 1) os << " ";
        os << row.n_per_vertex[i];
    }
    os << "\"," << row.external_legs << "," << row.branch_excess << "," << row.perturbative << ","
       << row.standard << "," << row.theorem1 << ",";
    if (row.theorem2) os << *row.theorem2;
    os << ",";
    if (row.loop) os << *row.loop;
    os << ",";
    if (row.amplitude_abs) os << *row.amplitude_abs;
    os << "," << (row.bound_only ? 1 : 0) << "," << (row.domination_ok ? 1 : 0);
    return os.str();
}

void append_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("io: cannot append to " + path);
    for (const auto& line : lines) out << line << "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io: cannot write " + path);
    out << content;
}

}  // namespace io
}  // namespace fermitree
