#include "kickrom/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "kickrom/errors.hpp"
#include "kickrom/io.hpp"

namespace kickrom {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text)
{
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw InputError("config line " + std::to_string(lineNo) + ": unterminated section");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InputError("config line " + std::to_string(lineNo) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw InputError("config line " + std::to_string(lineNo) + ": empty key");
        }
        cfg.set(section.empty() ? key : section + "." + key, value);
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open config file " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void KeyValueConfig::set(const std::string& key, const std::string& value)
{
    entries_[key] = value;
}

void KeyValueConfig::apply_override(const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw InputError("override must have the form key=value: " + assignment);
    }
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

bool KeyValueConfig::contains(const std::string& key) const
{
    return entries_.count(key) != 0;
}

std::optional<std::string> KeyValueConfig::raw(const std::string& key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    consumed_.insert(key);
    return it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const
{
    const auto v = raw(key);
    if (!v) {
        return fallback;
    }
    try {
        return parse_double(*v);
    } catch (const InputError&) {
        throw InputError("config key " + key + ": not a number: " + *v);
    }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const
{
    const auto v = raw(key);
    if (!v) {
        return fallback;
    }
    int out = 0;
    const auto* end = v->data() + v->size();
    const auto res = std::from_chars(v->data(), end, out);
    if (res.ec != std::errc() || res.ptr != end) {
        throw InputError("config key " + key + ": not an integer: " + *v);
    }
    return out;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const
{
    const auto v = raw(key);
    if (!v) {
        return fallback;
    }
    if (*v == "true" || *v == "1" || *v == "yes") {
        return true;
    }
    if (*v == "false" || *v == "0" || *v == "no") {
        return false;
    }
    throw InputError("config key " + key + ": not a boolean: " + *v);
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const
{
    const auto v = raw(key);
    return v ? *v : fallback;
}

std::vector<std::string> KeyValueConfig::unconsumed() const
{
    std::vector<std::string> out;
    for (const auto& [key, value] : entries_) {
        if (!consumed_.count(key)) {
            out.push_back(key);
        }
    }
    return out;
}

std::string KeyValueConfig::to_text() const
{
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> bySection;
    for (const auto& [key, value] : entries_) {
        const auto dot = key.rfind('.');
        if (dot == std::string::npos) {
            bySection[""].emplace_back(key, value);
        } else {
            bySection[key.substr(0, dot)].emplace_back(key.substr(dot + 1), value);
        }
    }
    std::ostringstream out;
    for (const auto& [section, items] : bySection) {
        if (!section.empty()) {
            out << "[" << section << "]\n";
        }
        for (const auto& [k, v] : items) {
            out << k << " = " << v << "\n";
        }
    }
    return out.str();
}

SystemParams read_system_params(const KeyValueConfig& cfg)
{
    SystemParams p;
    const bool dimensioned = cfg.contains("dimensioned.length");
    if (dimensioned) {
        DimensionedParams d;
        d.density = cfg.get_double("dimensioned.density", d.density);
        d.crossSectionArea = cfg.get_double("dimensioned.cross_section_area", 0.0);
        d.youngsModulus = cfg.get_double("dimensioned.youngs_modulus", 0.0);
        d.areaMomentInertia = cfg.get_double("dimensioned.area_moment_inertia", 0.0);
        d.length = cfg.get_double("dimensioned.length", 0.0);
        d.tipMass = cfg.get_double("dimensioned.tip_mass", 0.0);
        d.tipStiffness = cfg.get_double("dimensioned.tip_stiffness", 0.0);
        d.kickForce = cfg.get_double("dimensioned.kick_force", 0.0);
        d.materialDamping = cfg.get_double("dimensioned.material_damping", 0.0);
        d.viscousDamping = cfg.get_double("dimensioned.viscous_damping", 0.0);
        d.kickerWidth = cfg.get_double("dimensioned.kicker_width", 0.0);
        d.criticalVelocity = cfg.get_double("dimensioned.critical_velocity", 0.0);
        p = nondimensionalize(d, cfg.get_int("system.N", p.N));
    }
    p.cv = cfg.get_double("system.cv", p.cv);
    p.cm = cfg.get_double("system.cm", p.cm);
    p.m = cfg.get_double("system.m", p.m);
    p.k = cfg.get_double("system.k", p.k);
    p.F = cfg.get_double("system.F", p.F);
    p.d = cfg.get_double("system.d", p.d);
    p.vcr = cfg.get_double("system.vcr", p.vcr);
    p.N = cfg.get_int("system.N", p.N);
    p.validate();
    return p;
}

void write_system_params(KeyValueConfig& cfg, const SystemParams& p)
{
    cfg.set("system.cv", format_double(p.cv));
    cfg.set("system.cm", format_double(p.cm));
    cfg.set("system.m", format_double(p.m));
    cfg.set("system.k", format_double(p.k));
    cfg.set("system.F", format_double(p.F));
    cfg.set("system.d", format_double(p.d));
    cfg.set("system.vcr", format_double(p.vcr));
    cfg.set("system.N", std::to_string(p.N));
}

}  // namespace kickrom
