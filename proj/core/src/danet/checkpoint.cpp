#include "lfaa/danet/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace lfaa::danet {

namespace {

constexpr char kMagic[4] = {'D', 'A', '2', 'N'};
constexpr uint32_t kVersion = 1;

struct Entry {
    std::string name;
    uint32_t kind; // 0 w, 1 b, 2 running_mean, 3 running_var
    const std::vector<double>* data;
    std::vector<double>* target = nullptr;
};

template <typename T>
void put(std::ostream& os, T v) {
    // Host is little-endian (x86/aarch64); write raw.
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

std::vector<Entry> entry_table(const Graph& g, const NetworkParams& p) {
    if (p.w.size() != g.slots.size())
        throw ValidationError("checkpoint: params do not match graph");
    std::vector<Entry> entries;
    for (size_t i = 0; i < g.slots.size(); ++i) {
        const ParamSlot& s = g.slots[i];
        entries.push_back({s.name, 0, &p.w[i]});
        if (s.b_size > 0) entries.push_back({s.name, 1, &p.b[i]});
        if (s.norm) {
            entries.push_back({s.name, 2, &p.running_mean[i]});
            entries.push_back({s.name, 3, &p.running_var[i]});
        }
    }
    return entries;
}

} // namespace

void save_checkpoint(const std::string& path, const Graph& g, const NetworkParams& p) {
    if (!p.finite()) throw NumericalError("save_checkpoint: non-finite parameters");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("save_checkpoint: cannot open " + path);

    const auto entries = entry_table(g, p);
    os.write(kMagic, 4);
    put<uint32_t>(os, kVersion);
    put<uint32_t>(os, static_cast<uint32_t>(entries.size()));
    for (const auto& e : entries) {
        put<uint32_t>(os, static_cast<uint32_t>(e.name.size()));
        os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
        put<uint32_t>(os, e.kind);
        put<uint64_t>(os, e.data->size());
    }
    for (const auto& e : entries)
        for (double v : *e.data) put<float>(os, static_cast<float>(v));
    if (!os) throw NumericalError("save_checkpoint: write failed on " + path);
}

NetworkParams load_checkpoint(const std::string& path, const Graph& g) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("load_checkpoint: cannot open " + path);

    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw ValidationError("load_checkpoint: bad magic in " + path);
    const auto version = get<uint32_t>(is);
    if (version != kVersion)
        throw ValidationError("load_checkpoint: unsupported version " +
                              std::to_string(version));

    NetworkParams p;
    p.w.resize(g.slots.size());
    p.b.resize(g.slots.size());
    p.running_mean.resize(g.slots.size());
    p.running_var.resize(g.slots.size());
    for (size_t i = 0; i < g.slots.size(); ++i) {
        p.w[i].resize(g.slots[i].w_size);
        p.b[i].resize(g.slots[i].b_size);
        if (g.slots[i].norm) {
            p.running_mean[i].resize(g.slots[i].channels);
            p.running_var[i].resize(g.slots[i].channels);
        }
    }

    auto expected = entry_table(g, p);
    const auto count = get<uint32_t>(is);
    if (count != expected.size())
        throw ValidationError("load_checkpoint: entry count mismatch in " + path);

    std::vector<std::vector<double>*> targets;
    for (size_t i = 0; i < g.slots.size(); ++i) {
        targets.push_back(&p.w[i]);
        if (g.slots[i].b_size > 0) targets.push_back(&p.b[i]);
        if (g.slots[i].norm) {
            targets.push_back(&p.running_mean[i]);
            targets.push_back(&p.running_var[i]);
        }
    }

    for (size_t e = 0; e < expected.size(); ++e) {
        const auto name_len = get<uint32_t>(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        const auto kind = get<uint32_t>(is);
        const auto n = get<uint64_t>(is);
        if (!is || name != expected[e].name || kind != expected[e].kind ||
            n != expected[e].data->size())
            throw ValidationError("load_checkpoint: layer table mismatch at entry " +
                                  std::to_string(e) + " (" + name + ")");
    }
    for (auto* t : targets)
        for (double& v : *t) {
            v = get<float>(is);
            if (!is) throw ValidationError("load_checkpoint: truncated data in " + path);
        }
    if (!p.finite()) throw NumericalError("load_checkpoint: non-finite parameters");
    return p;
}

} // namespace lfaa::danet
