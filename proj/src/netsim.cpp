#include "pinsim/netsim.hpp"

#include "pinsim/csv.hpp"
#include "pinsim/error.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

namespace pinsim {

// ---------------------------------------------------------------------------
// EcosystemNetwork
// ---------------------------------------------------------------------------

std::uint32_t EcosystemNetwork::Builder::lookup(std::string_view name) {
    auto it = std::lower_bound(index_.begin(), index_.end(), name,
                               [](const auto& entry, std::string_view n) { return entry.first < n; });
    if (it == index_.end() || it->first != name) {
        throw_error(errc::unknown_package, "unknown package in edge: " + std::string(name));
    }
    return it->second;
}

std::uint32_t EcosystemNetwork::Builder::add_package(std::string name, std::uint64_t downloads,
                                                     std::optional<std::uint32_t> maintainers) {
    auto it = std::lower_bound(index_.begin(), index_.end(), name,
                               [](const auto& entry, const std::string& n) { return entry.first < n; });
    if (it != index_.end() && it->first == name) {
        downloads_[it->second] = downloads;
        maintainers_[it->second] = maintainers;
        return it->second;
    }
    const auto idx = static_cast<std::uint32_t>(names_.size());
    index_.insert(it, {name, idx});
    names_.push_back(std::move(name));
    downloads_.push_back(downloads);
    maintainers_.push_back(maintainers);
    return idx;
}

void EcosystemNetwork::Builder::add_edge(std::string_view dependent, std::string_view dependency,
                                         ConstraintClass cls) {
    const std::uint32_t from = lookup(dependent);
    const std::uint32_t to = lookup(dependency);
    if (from == to) {
        throw_error(errc::data_error, "self-loop on package " + std::string(dependent));
    }
    edges_.emplace_back(from, to, cls);
}

EcosystemNetwork EcosystemNetwork::Builder::build() {
    EcosystemNetwork net;
    net.names_ = std::move(names_);
    net.downloads_ = std::move(downloads_);
    net.index_ = std::move(index_);
    const std::size_t n = net.names_.size();

    net.has_maintainers_ = !maintainers_.empty() &&
                           std::all_of(maintainers_.begin(), maintainers_.end(),
                                       [](const auto& m) { return m.has_value(); });
    net.maintainers_.resize(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (maintainers_[i]) net.maintainers_[i] = *maintainers_[i];
    }

    net.total_downloads_ = std::accumulate(net.downloads_.begin(), net.downloads_.end(),
                                           std::uint64_t{0});
    net.edge_total_ = edges_.size();

    std::vector<std::uint32_t> out_count(n, 0);
    std::vector<std::uint32_t> in_count(n, 0);
    for (const auto& [from, to, cls] : edges_) {
        ++out_count[from];
        ++in_count[to];
    }
    net.dep_offsets_.assign(n + 1, 0);
    net.rev_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        net.dep_offsets_[i + 1] = net.dep_offsets_[i] + out_count[i];
        net.rev_offsets_[i + 1] = net.rev_offsets_[i] + in_count[i];
    }
    net.dep_edges_.resize(edges_.size());
    net.rev_edges_.resize(edges_.size());
    std::vector<std::uint32_t> dep_cursor(net.dep_offsets_.begin(), net.dep_offsets_.end() - 1);
    std::vector<std::uint32_t> rev_cursor(net.rev_offsets_.begin(), net.rev_offsets_.end() - 1);
    for (const auto& [from, to, cls] : edges_) {
        net.dep_edges_[dep_cursor[from]++] = {to, cls};
        net.rev_edges_[rev_cursor[to]++] = {from, cls};
    }
    return net;
}

std::optional<std::uint32_t> EcosystemNetwork::find(std::string_view name) const {
    auto it = std::lower_bound(index_.begin(), index_.end(), name,
                               [](const auto& entry, std::string_view n) { return entry.first < n; });
    if (it == index_.end() || it->first != name) return std::nullopt;
    return it->second;
}

std::size_t EcosystemNetwork::out_degree(std::uint32_t node) const {
    return dep_offsets_[node + 1] - dep_offsets_[node];
}

const EcosystemNetwork::EdgeRef* EcosystemNetwork::deps_begin(std::uint32_t node) const {
    return dep_edges_.data() + dep_offsets_[node];
}
const EcosystemNetwork::EdgeRef* EcosystemNetwork::deps_end(std::uint32_t node) const {
    return dep_edges_.data() + dep_offsets_[node + 1];
}
const EcosystemNetwork::EdgeRef* EcosystemNetwork::dependents_begin(std::uint32_t node) const {
    return rev_edges_.data() + rev_offsets_[node];
}
const EcosystemNetwork::EdgeRef* EcosystemNetwork::dependents_end(std::uint32_t node) const {
    return rev_edges_.data() + rev_offsets_[node + 1];
}

namespace {

std::uint64_t parse_u64(const std::string& s, const char* what) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(std::string("bad ") + what + ": \"" + s + "\"", 0);
    }
    return value;
}

} // namespace

EcosystemNetwork EcosystemNetwork::load_csv(std::istream& nodes, std::istream& edges) {
    Builder builder;
    const auto node_rows = csv::read_all(nodes);
    for (std::size_t i = 0; i < node_rows.size(); ++i) {
        const auto& row = node_rows[i];
        if (i == 0 && !row.empty() && row[0] == "package") continue;
        if (row.size() != 2 && row.size() != 3) {
            throw ParseError("nodes line " + std::to_string(i + 1) + ": expected 2 or 3 fields",
                             i + 1);
        }
        std::optional<std::uint32_t> maintainers;
        if (row.size() == 3 && !row[2].empty()) {
            maintainers = static_cast<std::uint32_t>(parse_u64(row[2], "maintainer count"));
        }
        builder.add_package(row[0], parse_u64(row[1], "download count"), maintainers);
    }
    const auto edge_rows = csv::read_all(edges);
    for (std::size_t i = 0; i < edge_rows.size(); ++i) {
        const auto& row = edge_rows[i];
        if (i == 0 && !row.empty() && row[0] == "dependent") continue;
        if (row.size() != 3) {
            throw ParseError("edges line " + std::to_string(i + 1) + ": expected 3 fields", i + 1);
        }
        const auto cls = constraint_class_from_string(row[2]);
        if (!cls) {
            throw ParseError("edges line " + std::to_string(i + 1) + ": bad class \"" + row[2] +
                                 "\"",
                             i + 1);
        }
        builder.add_edge(row[0], row[1], *cls);
    }
    return builder.build();
}

EcosystemNetwork EcosystemNetwork::load_csv_files(const std::string& nodes_path,
                                                  const std::string& edges_path) {
    std::ifstream nodes(nodes_path);
    if (!nodes) throw_error(errc::io_error, "cannot open nodes file: " + nodes_path);
    std::ifstream edges(edges_path);
    if (!edges) throw_error(errc::io_error, "cannot open edges file: " + edges_path);
    return load_csv(nodes, edges);
}

void EcosystemNetwork::write_nodes_csv(std::ostream& out) const {
    out << (has_maintainers_ ? "package,downloads,maintainers\n" : "package,downloads\n");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (has_maintainers_) {
            csv::write_row(out, {names_[i], std::to_string(downloads_[i]),
                                 std::to_string(maintainers_[i])});
        } else {
            csv::write_row(out, {names_[i], std::to_string(downloads_[i])});
        }
    }
}

void EcosystemNetwork::write_edges_csv(std::ostream& out) const {
    out << "dependent,dependency,class\n";
    for (std::size_t from = 0; from < names_.size(); ++from) {
        for (const EdgeRef* e = deps_begin(static_cast<std::uint32_t>(from));
             e != deps_end(static_cast<std::uint32_t>(from)); ++e) {
            csv::write_row(out, {names_[from], names_[e->node], std::string(to_string(e->cls))});
        }
    }
}

// ---------------------------------------------------------------------------
// Attack propagation
// ---------------------------------------------------------------------------

std::string_view to_string(PinningMechanism m) {
    return m == PinningMechanism::LocalPinning ? "local" : "transitive";
}

std::string_view to_string(DefenseStrategy s) {
    switch (s) {
    case DefenseStrategy::Downloads: return "downloads";
    case DefenseStrategy::OutDegree: return "out-degree";
    case DefenseStrategy::Betweenness: return "betweenness";
    case DefenseStrategy::DownloadsTimesOutDegree: return "downloads-x-out-degree";
    case DefenseStrategy::DownloadsTimesBetweenness: return "downloads-x-betweenness";
    }
    return "downloads";
}

std::optional<PinningMechanism> mechanism_from_string(std::string_view name) {
    if (name == "local") return PinningMechanism::LocalPinning;
    if (name == "transitive") return PinningMechanism::TransitivePinning;
    return std::nullopt;
}

std::optional<DefenseStrategy> strategy_from_string(std::string_view name) {
    if (name == "downloads") return DefenseStrategy::Downloads;
    if (name == "out-degree") return DefenseStrategy::OutDegree;
    if (name == "betweenness") return DefenseStrategy::Betweenness;
    if (name == "downloads-x-out-degree") return DefenseStrategy::DownloadsTimesOutDegree;
    if (name == "downloads-x-betweenness") return DefenseStrategy::DownloadsTimesBetweenness;
    return std::nullopt;
}

namespace {

void check_target(const EcosystemNetwork& net, std::uint32_t target) {
    if (target >= net.node_count()) {
        throw_error(errc::unknown_package, "target index out of range");
    }
}

// Shared BFS core; returns a visited mask over packages (target excluded).
std::vector<bool> affected_mask(const EcosystemNetwork& net, std::uint32_t target,
                                const DefensePlan& plan) {
    check_target(net, target);
    const std::size_t n = net.node_count();
    std::vector<bool> defended(n, false);
    for (std::uint32_t d : plan.defended) {
        if (d < n) defended[d] = true;
    }
    const bool honor = plan.floating_mode == FloatingMode::HonorDeclared;

    std::vector<bool> visited(n, false);
    std::deque<std::uint32_t> queue;

    if (plan.mechanism == PinningMechanism::TransitivePinning) {
        if (defended[target]) return visited;
        for (const auto* e = net.dependents_begin(target); e != net.dependents_end(target); ++e) {
            if (defended[e->node]) continue;
            if (honor && !is_floating(e->cls)) continue;
            if (!visited[e->node]) {
                visited[e->node] = true;
                queue.push_back(e->node);
            }
        }
        while (!queue.empty()) {
            const std::uint32_t u = queue.front();
            queue.pop_front();
            for (const auto* e = net.dependents_begin(u); e != net.dependents_end(u); ++e) {
                if (defended[e->node] || visited[e->node]) continue;
                visited[e->node] = true;
                queue.push_back(e->node);
            }
        }
    } else {
        // Local pinning blocks only the final edge into the target; the
        // expansion from the seed set ignores defenses entirely.
        for (const auto* e = net.dependents_begin(target); e != net.dependents_end(target); ++e) {
            if (defended[e->node]) continue;
            if (honor && !is_floating(e->cls)) continue;
            if (!visited[e->node]) {
                visited[e->node] = true;
                queue.push_back(e->node);
            }
        }
        while (!queue.empty()) {
            const std::uint32_t u = queue.front();
            queue.pop_front();
            for (const auto* e = net.dependents_begin(u); e != net.dependents_end(u); ++e) {
                if (visited[e->node]) continue;
                visited[e->node] = true;
                queue.push_back(e->node);
            }
        }
    }
    visited[target] = false;
    return visited;
}

} // namespace

std::vector<std::uint32_t> affected_set(const EcosystemNetwork& net, std::uint32_t target,
                                        const DefensePlan& plan) {
    const std::vector<bool> mask = affected_mask(net, target, plan);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) out.push_back(i);
    }
    return out;
}

double impact(const EcosystemNetwork& net, std::uint32_t target, const DefensePlan& plan) {
    if (net.total_downloads() == 0) {
        throw_error(errc::zero_downloads, "network has zero total downloads");
    }
    const std::vector<bool> mask = affected_mask(net, target, plan);
    std::uint64_t affected = 0;
    for (std::uint32_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) affected += net.downloads(i);
    }
    return static_cast<double>(affected) / static_cast<double>(net.total_downloads());
}

double impact_by_name(const EcosystemNetwork& net, std::string_view target,
                      const DefensePlan& plan) {
    const auto idx = net.find(target);
    if (!idx) throw_error(errc::unknown_package, "unknown package: " + std::string(target));
    return impact(net, *idx, plan);
}

double risk(const EcosystemNetwork& net, const std::vector<std::uint32_t>& targets,
            const DefensePlan& plan, unsigned jobs) {
    if (targets.empty()) throw_error(errc::empty_target_set, "risk over an empty target set");
    std::vector<double> impacts(targets.size(), 0.0);
    if (jobs <= 1 || targets.size() <= 1) {
        for (std::size_t i = 0; i < targets.size(); ++i) impacts[i] = impact(net, targets[i], plan);
    } else {
        std::atomic<std::size_t> cursor{0};
        auto worker = [&]() {
            while (true) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= targets.size()) break;
                impacts[i] = impact(net, targets[i], plan);
            }
        };
        std::vector<std::thread> pool;
        const unsigned n = std::min<unsigned>(jobs, static_cast<unsigned>(targets.size()));
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    double sum = 0.0;
    for (double v : impacts) sum += v;
    return sum / static_cast<double>(targets.size());
}

// ---------------------------------------------------------------------------
// All-targets impact: SCC condensation + reverse-topological bitsets
// ---------------------------------------------------------------------------

namespace {

// Iterative Tarjan over the dependent-direction graph. Components come out
// in reverse topological order: every component a node can reach over
// dependent edges is emitted before the node's own component.
struct SccResult {
    std::vector<std::uint32_t> component;  // node -> component id
    std::uint32_t count = 0;
};

SccResult tarjan_dependents(const EcosystemNetwork& net) {
    const std::size_t n = net.node_count();
    SccResult result;
    result.component.assign(n, UINT32_MAX);

    constexpr std::uint32_t kUnvisited = UINT32_MAX;
    std::vector<std::uint32_t> index(n, kUnvisited);
    std::vector<std::uint32_t> lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::uint32_t next_index = 0;

    struct Frame {
        std::uint32_t node;
        const EcosystemNetwork::EdgeRef* it;
    };
    std::vector<Frame> frames;

    for (std::uint32_t start = 0; start < n; ++start) {
        if (index[start] != kUnvisited) continue;
        frames.push_back({start, net.dependents_begin(start)});
        index[start] = lowlink[start] = next_index++;
        stack.push_back(start);
        on_stack[start] = true;

        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.it != net.dependents_end(f.node)) {
                const std::uint32_t w = f.it->node;
                ++f.it;
                if (index[w] == kUnvisited) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, net.dependents_begin(w)});
                } else if (on_stack[w]) {
                    lowlink[f.node] = std::min(lowlink[f.node], index[w]);
                }
            } else {
                const std::uint32_t v = f.node;
                frames.pop_back();
                if (!frames.empty()) {
                    lowlink[frames.back().node] = std::min(lowlink[frames.back().node], lowlink[v]);
                }
                if (lowlink[v] == index[v]) {
                    while (true) {
                        const std::uint32_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        result.component[w] = result.count;
                        if (w == v) break;
                    }
                    ++result.count;
                }
            }
        }
    }
    return result;
}

} // namespace

std::vector<double> all_impacts(const EcosystemNetwork& net) {
    if (net.total_downloads() == 0) {
        throw_error(errc::zero_downloads, "network has zero total downloads");
    }
    const std::size_t n = net.node_count();
    const SccResult scc = tarjan_dependents(net);
    const std::size_t nc = scc.count;

    std::vector<std::uint64_t> comp_downloads(nc, 0);
    for (std::uint32_t v = 0; v < n; ++v) comp_downloads[scc.component[v]] += net.downloads(v);

    // Component adjacency (dedup via sort-unique per component).
    std::vector<std::vector<std::uint32_t>> comp_children(nc);
    for (std::uint32_t v = 0; v < n; ++v) {
        const std::uint32_t cv = scc.component[v];
        for (const auto* e = net.dependents_begin(v); e != net.dependents_end(v); ++e) {
            const std::uint32_t cw = scc.component[e->node];
            if (cw != cv) comp_children[cv].push_back(cw);
        }
    }
    for (auto& children : comp_children) {
        std::sort(children.begin(), children.end());
        children.erase(std::unique(children.begin(), children.end()), children.end());
    }

    // Reach bitsets in Tarjan emission order: successors are always emitted
    // first, so their sets are final when a component is processed.
    const std::size_t blocks = (nc + 63) / 64;
    std::vector<std::uint64_t> reach(nc * blocks, 0);
    std::vector<std::uint64_t> reach_downloads(nc, 0);
    for (std::uint32_t c = 0; c < nc; ++c) {
        std::uint64_t* bits = reach.data() + static_cast<std::size_t>(c) * blocks;
        bits[c / 64] |= std::uint64_t{1} << (c % 64);
        for (std::uint32_t child : comp_children[c]) {
            const std::uint64_t* cb = reach.data() + static_cast<std::size_t>(child) * blocks;
            for (std::size_t b = 0; b < blocks; ++b) bits[b] |= cb[b];
        }
        std::uint64_t sum = 0;
        for (std::size_t b = 0; b < blocks; ++b) {
            std::uint64_t word = bits[b];
            while (word) {
                const int bit = std::countr_zero(word);
                sum += comp_downloads[b * 64 + static_cast<std::size_t>(bit)];
                word &= word - 1;
            }
        }
        reach_downloads[c] = sum;
    }

    std::vector<double> impacts(n, 0.0);
    const double total = static_cast<double>(net.total_downloads());
    for (std::uint32_t v = 0; v < n; ++v) {
        const std::uint64_t reached = reach_downloads[scc.component[v]] - net.downloads(v);
        impacts[v] = static_cast<double>(reached) / total;
    }
    return impacts;
}

// ---------------------------------------------------------------------------
// Target ranking, betweenness, defense selection
// ---------------------------------------------------------------------------

std::vector<std::uint32_t> rank_targets(const EcosystemNetwork& net, const AttackSelection& sel) {
    const std::size_t n = net.node_count();
    const std::size_t count = std::min(sel.count, n);
    switch (sel.kind) {
    case AttackSelection::Kind::TopImpact: {
        const std::vector<double> impacts = all_impacts(net);
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (impacts[a] != impacts[b]) return impacts[a] > impacts[b];
            return net.name(a) < net.name(b);
        });
        order.resize(count);
        return order;
    }
    case AttackSelection::Kind::RandomActive: {
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 rng(sel.seed);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
            std::swap(order[i], order[j]);
        }
        order.resize(count);
        return order;
    }
    case AttackSelection::Kind::Fragile: {
        if (!net.has_maintainer_data()) {
            throw_error(errc::missing_maintainer_data,
                        "fragile target selection requires maintainer counts");
        }
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (net.maintainers(a) != net.maintainers(b)) {
                return net.maintainers(a) < net.maintainers(b);
            }
            return net.name(a) < net.name(b);
        });
        order.resize(count);
        return order;
    }
    }
    return {};
}

std::vector<double> betweenness(const EcosystemNetwork& net, std::size_t sample_count,
                                std::uint64_t seed) {
    const std::size_t n = net.node_count();
    std::vector<double> centrality(n, 0.0);
    if (n == 0) return centrality;

    std::vector<std::uint32_t> sources;
    double scale = 1.0;
    if (sample_count == 0 || sample_count >= n) {
        sources.resize(n);
        std::iota(sources.begin(), sources.end(), 0);
    } else {
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < sample_count; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
            std::swap(order[i], order[j]);
        }
        sources.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sample_count));
        scale = static_cast<double>(n) / static_cast<double>(sample_count);
    }

    std::vector<std::int32_t> dist(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<std::uint32_t> order_visited;
    std::vector<std::vector<std::uint32_t>> preds(n);
    order_visited.reserve(n);

    for (std::uint32_t s : sources) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : preds) p.clear();
        order_visited.clear();

        dist[s] = 0;
        sigma[s] = 1.0;
        std::deque<std::uint32_t> queue{s};
        while (!queue.empty()) {
            const std::uint32_t v = queue.front();
            queue.pop_front();
            order_visited.push_back(v);
            for (const auto* e = net.deps_begin(v); e != net.deps_end(v); ++e) {
                const std::uint32_t w = e->node;
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        for (auto it = order_visited.rbegin(); it != order_visited.rend(); ++it) {
            const std::uint32_t w = *it;
            for (std::uint32_t v : preds[w]) {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if (w != s) centrality[w] += delta[w];
        }
    }
    if (scale != 1.0) {
        for (double& c : centrality) c *= scale;
    }
    return centrality;
}

std::vector<std::uint32_t> select_defense(const EcosystemNetwork& net, DefenseStrategy strategy,
                                          std::size_t n,
                                          const std::vector<double>* betweenness_scores) {
    const std::size_t count = std::min(n, net.node_count());
    if (count == 0) return {};

    std::vector<double> score(net.node_count(), 0.0);
    std::vector<double> bc;
    const std::vector<double>* bptr = betweenness_scores;
    if ((strategy == DefenseStrategy::Betweenness ||
         strategy == DefenseStrategy::DownloadsTimesBetweenness) &&
        !bptr) {
        bc = betweenness(net);
        bptr = &bc;
    }
    for (std::uint32_t i = 0; i < net.node_count(); ++i) {
        switch (strategy) {
        case DefenseStrategy::Downloads:
            score[i] = static_cast<double>(net.downloads(i));
            break;
        case DefenseStrategy::OutDegree:
            score[i] = static_cast<double>(net.out_degree(i));
            break;
        case DefenseStrategy::Betweenness:
            score[i] = (*bptr)[i];
            break;
        case DefenseStrategy::DownloadsTimesOutDegree:
            score[i] = static_cast<double>(net.downloads(i)) *
                       static_cast<double>(net.out_degree(i));
            break;
        case DefenseStrategy::DownloadsTimesBetweenness:
            score[i] = static_cast<double>(net.downloads(i)) * (*bptr)[i];
            break;
        }
    }
    std::vector<std::uint32_t> order(net.node_count());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return net.name(a) < net.name(b);
    });
    order.resize(count);
    return order;
}

std::vector<CurvePoint> defense_curve(const EcosystemNetwork& net,
                                      const std::vector<std::uint32_t>& targets,
                                      PinningMechanism mechanism, DefenseStrategy strategy,
                                      std::size_t n_max, FloatingMode mode, unsigned jobs,
                                      const std::vector<double>* betweenness_scores) {
    const std::vector<std::uint32_t> ranking =
        select_defense(net, strategy, n_max, betweenness_scores);
    std::vector<CurvePoint> points;
    points.reserve(n_max + 1);
    DefensePlan plan;
    plan.mechanism = mechanism;
    plan.floating_mode = mode;
    for (std::size_t k = 0; k <= n_max; ++k) {
        plan.defended.assign(ranking.begin(),
                             ranking.begin() + static_cast<std::ptrdiff_t>(std::min(k, ranking.size())));
        points.push_back({k, risk(net, targets, plan, jobs)});
    }
    return points;
}

void write_curve_csv(std::ostream& out, PinningMechanism mechanism, DefenseStrategy strategy,
                     const std::vector<CurvePoint>& points) {
    out << "mechanism,strategy,n,risk\n";
    char buf[40];
    for (const CurvePoint& p : points) {
        std::snprintf(buf, sizeof(buf), "%.12g", p.risk);
        csv::write_row(out, {std::string(to_string(mechanism)), std::string(to_string(strategy)),
                             std::to_string(p.n), std::string(buf)});
    }
}

} // namespace pinsim
