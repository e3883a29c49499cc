#include "polyproj/mesh.hpp"

#include "polyproj/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <utility>

namespace polyproj {

PolygonalMesh::PolygonalMesh(std::vector<Point> nodes, std::vector<std::vector<int>> elements)
    : nodes_(std::move(nodes)), elements_(std::move(elements)) {
  build_topology();
}

void PolygonalMesh::build_topology() {
  edges_.clear();
  element_edges_.assign(elements_.size(), {});
  std::map<std::pair<int, int>, int> lookup;
  for (int e = 0; e < num_elements(); ++e) {
    const auto& vs = elements_[e];
    const int n = static_cast<int>(vs.size());
    for (int j = 0; j < n; ++j) {
      const int p = vs[j];
      const int q = vs[(j + 1) % n];
      const auto key = std::minmax(p, q);
      auto [it, inserted] = lookup.try_emplace({key.first, key.second}, static_cast<int>(edges_.size()));
      if (inserted) {
        MeshEdge edge;
        edge.a = key.first;
        edge.b = key.second;
        edges_.push_back(std::move(edge));
      }
      edges_[it->second].uses.push_back({e, j, p < q});
      element_edges_[e].push_back(it->second);
    }
  }
  std::vector<int> boundary;
  for (const MeshEdge& edge : edges_) {
    if (!edge.on_boundary()) continue;
    boundary.push_back(edge.a);
    boundary.push_back(edge.b);
    if (edge.midpoint >= 0) boundary.push_back(edge.midpoint);
  }
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  boundary_nodes_ = std::move(boundary);
}

std::vector<int> PolygonalMesh::element_dofs(int e) const {
  std::vector<int> dofs = elements_[e];
  if (order_ == 2) {
    for (int edge : element_edges_[e]) dofs.push_back(edges_[edge].midpoint);
  }
  return dofs;
}

Polygon PolygonalMesh::element_polygon(int e) const {
  std::vector<Point> v;
  v.reserve(elements_[e].size());
  for (int i : elements_[e]) v.push_back(nodes_[i]);
  return make_polygon(v);
}

double PolygonalMesh::h() const {
  double h = 0.0;
  for (const auto& vs : elements_) {
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j)
        h = std::max(h, (nodes_[vs[i]] - nodes_[vs[j]]).norm());
  }
  return h;
}

namespace {

// Reference cell on a 20x20 integer lattice so tiled copies merge exactly.
constexpr std::array<std::array<int, 2>, 10> kCellNodes = {{
    {0, 0}, {10, 0}, {20, 0}, {20, 10}, {20, 20}, {10, 20}, {0, 20}, {0, 10},
    {11, 6},   // A = (0.55, 0.3)
    {9, 14},   // B = (0.45, 0.7)
}};
constexpr int kA = 8;
constexpr int kB = 9;
const std::array<std::vector<int>, 4> kCellElements = {{
    {0, 1, kA, kB, 7},
    {7, kB, 5, 6},
    {1, 2, 3, kA},
    {kA, 3, 4, 5, kB},
}};
constexpr int kCellUnits = 20;

}  // namespace

std::vector<Polygon> reference_cell_polygons() {
  std::vector<Polygon> out;
  for (const auto& element : kCellElements) {
    std::vector<Point> v;
    for (int i : element) {
      v.emplace_back(kCellNodes[i][0] / double(kCellUnits), kCellNodes[i][1] / double(kCellUnits));
    }
    out.push_back(make_polygon(v));
  }
  return out;
}

PolygonalMesh build_reference_mesh(int level) {
  if (level < 1) throw Error(ErrorCode::InvalidArgument, "mesh level must be >= 1");
  if (level > 12) throw Error(ErrorCode::InvalidArgument, "mesh level too large");
  const int cells = 1 << (level - 1);
  const double scale = 1.0 / (static_cast<double>(cells) * kCellUnits);

  std::map<std::pair<long, long>, int> index;
  std::vector<Point> nodes;
  std::vector<std::vector<int>> elements;
  elements.reserve(static_cast<std::size_t>(4 * cells * cells));
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      std::array<int, kCellNodes.size()> global{};
      for (std::size_t a = 0; a < kCellNodes.size(); ++a) {
        const long gx = static_cast<long>(i) * kCellUnits + kCellNodes[a][0];
        const long gy = static_cast<long>(j) * kCellUnits + kCellNodes[a][1];
        auto [it, inserted] = index.try_emplace({gx, gy}, static_cast<int>(nodes.size()));
        if (inserted) nodes.emplace_back(gx * scale, gy * scale);
        global[a] = it->second;
      }
      for (const auto& local : kCellElements) {
        std::vector<int> element;
        element.reserve(local.size());
        for (int a : local) element.push_back(global[a]);
        elements.push_back(std::move(element));
      }
    }
  }
  return PolygonalMesh(std::move(nodes), std::move(elements));
}

std::vector<MeshViolation> mesh_validate(const PolygonalMesh& mesh,
                                         std::optional<double> domain_area) {
  std::vector<MeshViolation> out;
  const int num_nodes = mesh.num_nodes();
  std::vector<char> used(num_nodes, 0);

  double area_sum = 0.0;
  bool indices_ok = true;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& vs = mesh.elements()[e];
    bool ok = true;
    for (int i : vs) {
      if (i < 0 || i >= num_nodes) {
        out.push_back({MeshIssue::IndexOutOfRange, e, i,
                       "element " + std::to_string(e) + " references missing node " + std::to_string(i)});
        ok = false;
      } else {
        used[i] = 1;
      }
    }
    if (!ok) {
      indices_ok = false;
      continue;
    }
    std::vector<Point> v;
    for (int i : vs) v.push_back(mesh.nodes()[i]);
    auto result = validate_polygon(v);
    if (auto* diag = std::get_if<PolygonDiagnostic>(&result)) {
      out.push_back({MeshIssue::InvalidElement, e, diag->vertex >= 0 ? vs[diag->vertex] : -1,
                     "element " + std::to_string(e) + ": " + to_string(diag->issue) + " (" +
                         diag->message + ")"});
    } else {
      area_sum += std::get<Polygon>(result).area();
    }
  }
  if (!indices_ok) return out;

  for (const MeshEdge& edge : mesh.edges()) {
    const std::string name = "edge (" + std::to_string(edge.a) + "," + std::to_string(edge.b) + ")";
    if (edge.uses.size() > 2) {
      out.push_back({MeshIssue::NonConformingEdge, edge.uses[2].element, edge.a,
                     name + " shared by " + std::to_string(edge.uses.size()) + " elements"});
    } else if (edge.uses.size() == 2 && edge.uses[0].forward == edge.uses[1].forward) {
      out.push_back({MeshIssue::NonConformingEdge, edge.uses[1].element, edge.a,
                     name + " traversed in the same direction by elements " +
                         std::to_string(edge.uses[0].element) + " and " +
                         std::to_string(edge.uses[1].element)});
    }
  }

  // A vertex lying inside a boundary edge is a hanging node.
  std::vector<int> vertex_nodes;
  for (int i = 0; i < num_nodes; ++i)
    if (used[i]) vertex_nodes.push_back(i);
  for (const MeshEdge& edge : mesh.edges()) {
    if (!edge.on_boundary()) continue;
    const Point& a = mesh.nodes()[edge.a];
    const Point& b = mesh.nodes()[edge.b];
    const double len = (b - a).norm();
    for (int i : vertex_nodes) {
      if (i == edge.a || i == edge.b) continue;
      const Point& x = mesh.nodes()[i];
      const double t = (x - a).dot(b - a) / (len * len);
      if (t <= 1e-12 || t >= 1.0 - 1e-12) continue;
      if (std::abs(cross(a, b, x)) / len <= kNodeMergeTolerance) {
        out.push_back({MeshIssue::NonConformingEdge, edge.uses[0].element, i,
                       "node " + std::to_string(i) + " hangs on edge (" + std::to_string(edge.a) +
                           "," + std::to_string(edge.b) + ")"});
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(num_nodes));
  std::iota(order.begin(), order.end(), 0);
  const auto& nodes = mesh.nodes();
  std::sort(order.begin(), order.end(), [&](int p, int q) { return nodes[p].x() < nodes[q].x(); });
  for (std::size_t s = 0; s < order.size(); ++s) {
    for (std::size_t t = s + 1; t < order.size(); ++t) {
      const int p = order[s];
      const int q = order[t];
      if (nodes[q].x() - nodes[p].x() > kNodeMergeTolerance) break;
      if ((nodes[p] - nodes[q]).norm() <= kNodeMergeTolerance) {
        const auto [lo, hi] = std::minmax(p, q);
        out.push_back({MeshIssue::DuplicateNode, -1, hi,
                       "node " + std::to_string(hi) + " duplicates node " + std::to_string(lo)});
      }
    }
  }

  if (mesh.order() == 1) {
    for (int i = 0; i < num_nodes; ++i) {
      if (!used[i]) {
        out.push_back({MeshIssue::UnusedNode, -1, i, "node " + std::to_string(i) + " is unused"});
      }
    }
  }

  if (domain_area && std::abs(area_sum - *domain_area) > 1e-12 * std::abs(*domain_area)) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "element areas sum to " << area_sum << ", expected "
        << *domain_area;
    out.push_back({MeshIssue::AreaMismatch, -1, -1, msg.str()});
  }
  return out;
}

PolygonalMesh add_midside_nodes(const PolygonalMesh& mesh) {
  if (mesh.order() == 2) return mesh;
  PolygonalMesh out = mesh;
  out.order_ = 2;
  for (MeshEdge& edge : out.edges_) {
    edge.midpoint = static_cast<int>(out.nodes_.size());
    out.nodes_.push_back(0.5 * (out.nodes_[edge.a] + out.nodes_[edge.b]));
  }
  for (const MeshEdge& edge : out.edges_) {
    if (edge.on_boundary()) out.boundary_nodes_.push_back(edge.midpoint);
  }
  std::sort(out.boundary_nodes_.begin(), out.boundary_nodes_.end());
  return out;
}

void write_mesh(std::ostream& os, const PolygonalMesh& mesh) {
  // Only vertex nodes are written; mid-side nodes are re-derived on load.
  const int num_vertices = mesh.order() == 2
                               ? mesh.num_nodes() - static_cast<int>(mesh.edges().size())
                               : mesh.num_nodes();
  os << "NODES " << num_vertices << '\n' << std::setprecision(17);
  for (int i = 0; i < num_vertices; ++i) os << mesh.nodes()[i].x() << ' ' << mesh.nodes()[i].y() << '\n';
  os << "ELEMENTS " << mesh.num_elements() << '\n';
  for (const auto& vs : mesh.elements()) {
    os << vs.size();
    for (int i : vs) os << ' ' << i;
    os << '\n';
  }
}

PolygonalMesh read_mesh(std::istream& is) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::Io, "mesh file: " + what); };
  std::string keyword;
  long count = 0;
  if (!(is >> keyword >> count) || keyword != "NODES" || count < 0) fail("expected 'NODES n'");
  std::vector<Point> nodes(static_cast<std::size_t>(count));
  for (auto& x : nodes) {
    if (!(is >> x.x() >> x.y())) fail("truncated node list");
  }
  if (!(is >> keyword >> count) || keyword != "ELEMENTS" || count < 0) fail("expected 'ELEMENTS m'");
  std::vector<std::vector<int>> elements(static_cast<std::size_t>(count));
  for (auto& element : elements) {
    int k = 0;
    if (!(is >> k) || k < 3) fail("bad element vertex count");
    element.resize(static_cast<std::size_t>(k));
    for (int& i : element) {
      if (!(is >> i)) fail("truncated element");
      if (i < 0 || i >= static_cast<int>(nodes.size())) fail("node index out of range");
    }
  }
  return PolygonalMesh(std::move(nodes), std::move(elements));
}

void write_mesh_file(const std::string& path, const PolygonalMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path);
  write_mesh(os, mesh);
}

PolygonalMesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path);
  return read_mesh(is);
}

std::string to_string(MeshIssue issue) {
  switch (issue) {
    case MeshIssue::IndexOutOfRange: return "IndexOutOfRange";
    case MeshIssue::InvalidElement: return "InvalidElement";
    case MeshIssue::NonConformingEdge: return "NonConformingEdge";
    case MeshIssue::DuplicateNode: return "DuplicateNode";
    case MeshIssue::UnusedNode: return "UnusedNode";
    case MeshIssue::AreaMismatch: return "AreaMismatch";
  }
  return "Unknown";
}

}  // namespace polyproj
