#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "kickrom/config.hpp"
#include "kickrom/errors.hpp"
#include "kickrom/io.hpp"
#include "kickrom/pipeline.hpp"

using namespace kickrom;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        std::random_device rd;
        path = fs::temp_directory_path() / ("kickrom_test_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const GeneratedDataset& reference_data()
{
    static const GeneratedDataset data = full_order_dataset(SystemParams{}, DatasetOptions{});
    return data;
}

}  // namespace

TEST_CASE("config: sections, comments and overrides")
{
    KeyValueConfig cfg = KeyValueConfig::parse("# header\nroot = 1\n[system]\nF = 12.7  # trailing\nN = 12\n"
                                               "[pod]\nmethod = covariance\n");
    CHECK(cfg.get_int("root", 0) == 1);
    CHECK(cfg.get_double("system.F", 0.0) == 12.7);
    cfg.apply_override("system.F=12.66");
    CHECK(cfg.get_double("system.F", 0.0) == 12.66);
    const SystemParams p = read_system_params(cfg);
    CHECK(p.F == 12.66);
    CHECK(p.N == 12);
    const auto left = cfg.unconsumed();
    REQUIRE(left.size() == 1);
    CHECK(left[0] == "pod.method");
    CHECK(read_pod(cfg).method == PodMethod::Covariance);
    CHECK(cfg.unconsumed().empty());
    CHECK_THROWS(cfg.apply_override("no_equals_sign"));
    CHECK_THROWS(KeyValueConfig::parse("[system\nF = 1\n"));
}

TEST_CASE("config: malformed and out-of-range values")
{
    KeyValueConfig cfg = KeyValueConfig::parse("[system]\nF = twelve\n");
    CHECK_THROWS(read_system_params(cfg));
    CHECK_THROWS_AS(read_system_params(KeyValueConfig::parse("[system]\nd = -0.2\n")), ParameterError);
    CHECK_THROWS(read_pod(KeyValueConfig::parse("[pod]\nmethod = qr\n")));
    CHECK_THROWS(read_sweep(KeyValueConfig::parse("[sweep]\nengine = both\n")));
}

TEST_CASE("config: text form round trip")
{
    KeyValueConfig cfg;
    write_system_params(cfg, SystemParams{});
    const KeyValueConfig back = KeyValueConfig::parse(cfg.to_text());
    CHECK(back.entries() == cfg.entries());
    const SystemParams p = read_system_params(back);
    CHECK(p.cm == 3e-4);
    CHECK(p.vcr == 0.05);
}

TEST_CASE("config: dimensioned block is rescaled")
{
    const KeyValueConfig cfg = KeyValueConfig::parse(
        "[dimensioned]\nlength = 1\ncross_section_area = 1\nyoungs_modulus = 1\narea_moment_inertia = 1\n"
        "density = 1\ntip_mass = 1\ntip_stiffness = 1000\nkick_force = 12.95\nmaterial_damping = 3e-4\n"
        "viscous_damping = 4.5\nkicker_width = 0.2\ncritical_velocity = 0.05\n");
    const SystemParams p = read_system_params(cfg);
    const SystemParams ref;
    CHECK(p.k == doctest::Approx(ref.k));
    CHECK(p.F == doctest::Approx(ref.F));
    CHECK(p.cv == doctest::Approx(ref.cv));
    CHECK(p.d == doctest::Approx(ref.d));
}

TEST_CASE("io: doubles survive text exactly")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double v = u(rng) * std::pow(10.0, (i % 40) - 20);
        REQUIRE(parse_double(format_double(v)) == v);
    }
    CHECK(parse_double(format_double(std::numeric_limits<double>::denorm_min())) ==
          std::numeric_limits<double>::denorm_min());
    CHECK(std::isinf(parse_double(format_double(std::numeric_limits<double>::infinity()))));
    CHECK_THROWS(parse_double("1.0x"));
    const Eigen::MatrixXd m = Eigen::MatrixXd::Random(4, 3);
    CHECK(matrix_from_csv(matrix_to_csv(m, {"a", "b", "c"}), true) == m);
}

TEST_CASE("io: snapshot directory round trip and tamper detection")
{
    TempDir tmp;
    const SnapshotSet& s = reference_data().snapshots;
    const std::string dir = (tmp.path / "snap").string();
    write_snapshots(s, dir);
    const SnapshotSet back = read_snapshots(dir);
    CHECK(back.W == s.W);
    CHECK(back.Wdot == s.Wdot);
    CHECK(back.tGrid == s.tGrid);
    CHECK(back.period == s.period);
    CHECK(back.kicks.size() == s.kicks.size());
    CHECK(back.fingerprint() == s.fingerprint());
    CHECK(back.params.F == s.params.F);

    Eigen::MatrixXd w = back.W;
    w(3, 7) += 1e-9;
    write_text_atomic((tmp.path / "snap" / "W.csv").string(), matrix_to_csv(w));
    CHECK_THROWS_AS(read_snapshots(dir), InputError);
    CHECK_THROWS(read_snapshots((tmp.path / "missing").string()));
}

TEST_CASE("io: decomposition and closure documents round trip")
{
    const SnapshotSet& s = reference_data().snapshots;
    const PodBasis basis = pod_decompose(s);
    const PodBasis back = pod_from_json(pod_to_json(basis));
    CHECK(back.modes == basis.modes);
    CHECK(back.spectrum == basis.spectrum);
    CHECK(back.chebCoeffs == basis.chebCoeffs);
    CHECK(back.rankThreshold == basis.rankThreshold);
    const ClosureReport r = closure_select(s, basis, 1e-4);
    const ClosureReport rb = ClosureReport::from_json(r.to_json());
    CHECK(rb.dissipationError == r.dissipationError);
    CHECK(rb.varianceP == r.varianceP);
    CHECK_THROWS(pod_from_json("not json"));
}

TEST_CASE("pipeline: list parsing")
{
    const auto v = parse_list("12.95, 12.75,12.66");
    REQUIRE(v.size() == 3);
    CHECK(v[1] == 12.75);
    CHECK(parse_list("12.95,,1").size() == 2);
    CHECK_THROWS(parse_list("12.95,1x"));
}
