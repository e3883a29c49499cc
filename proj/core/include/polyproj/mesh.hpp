#pragma once

#include "polyproj/geometry.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace polyproj {

struct EdgeUse {
  int element = -1;
  int local = -1;       // local edge index: (v_local, v_local+1)
  bool forward = true;  // element traverses the edge from `a` to `b`
};

struct MeshEdge {
  int a = -1;  // a < b
  int b = -1;
  std::vector<EdgeUse> uses;
  int midpoint = -1;  // node index of the mid-side node, -1 for linear meshes

  bool on_boundary() const { return uses.size() == 1; }
};

/// Vertex coordinates plus counter-clockwise element connectivity. Edges and
/// boundary nodes are derived on construction; the constructor does not
/// validate, see mesh_validate.
class PolygonalMesh {
 public:
  PolygonalMesh() = default;
  PolygonalMesh(std::vector<Point> nodes, std::vector<std::vector<int>> elements);

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<std::vector<int>>& elements() const { return elements_; }
  const std::vector<MeshEdge>& edges() const { return edges_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }

  /// Edge indices of element e in local order.
  const std::vector<int>& element_edges(int e) const { return element_edges_[e]; }

  /// Sorted node indices on the boundary (vertices, plus mid-side nodes of
  /// boundary edges when order() == 2).
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }

  /// 1 for vertex-only meshes, 2 once mid-side nodes have been added.
  int order() const { return order_; }

  /// Degrees of freedom of element e: vertices, then mid-side nodes in edge order.
  std::vector<int> element_dofs(int e) const;

  Polygon element_polygon(int e) const;

  /// Maximum element diameter.
  double h() const;

 private:
  friend PolygonalMesh add_midside_nodes(const PolygonalMesh& mesh);
  void build_topology();

  std::vector<Point> nodes_;
  std::vector<std::vector<int>> elements_;
  std::vector<MeshEdge> edges_;
  std::vector<std::vector<int>> element_edges_;
  std::vector<int> boundary_nodes_;
  int order_ = 1;
};

/// Unit square tiled by 2^(k-1) x 2^(k-1) copies of a fixed cell holding two
/// quadrilaterals and two pentagons.
PolygonalMesh build_reference_mesh(int level);

/// The four polygons of the reference cell, in mesh element order.
std::vector<Polygon> reference_cell_polygons();

enum class MeshIssue {
  IndexOutOfRange,
  InvalidElement,
  NonConformingEdge,
  DuplicateNode,
  UnusedNode,
  AreaMismatch,
};

struct MeshViolation {
  MeshIssue issue;
  int element = -1;
  int node = -1;
  std::string message;
};

/// Lists every violated mesh invariant; never throws. `domain_area`, when
/// given, is compared against the sum of element areas (1e-12 relative).
std::vector<MeshViolation> mesh_validate(const PolygonalMesh& mesh,
                                         std::optional<double> domain_area = std::nullopt);

/// Adds one node at each unique edge midpoint.
PolygonalMesh add_midside_nodes(const PolygonalMesh& mesh);

void write_mesh(std::ostream& os, const PolygonalMesh& mesh);
PolygonalMesh read_mesh(std::istream& is);
void write_mesh_file(const std::string& path, const PolygonalMesh& mesh);
PolygonalMesh read_mesh_file(const std::string& path);

std::string to_string(MeshIssue issue);

inline constexpr double kNodeMergeTolerance = 1e-10;

}  // namespace polyproj
