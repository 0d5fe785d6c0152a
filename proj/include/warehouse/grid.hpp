#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace warehouse {

/// Movement on the grid. The integer encoding is part of every file format
/// and Q-table layout, so it must never change.
enum class Action : int { Up = 0, Down = 1, Left = 2, Right = 3 };

inline constexpr std::size_t kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::Up, Action::Down, Action::Left, Action::Right};

constexpr std::size_t index_of(Action a) { return static_cast<std::size_t>(a); }
Action action_from_index(std::size_t i);
const char* to_string(Action a);

struct Position {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const Position&, const Position&) = default;
};

/// Neighbouring cell, or nullopt when the move leaves a height x width grid.
std::optional<Position> neighbor(Position p, Action a, std::size_t height,
                                 std::size_t width);

enum class MapKind { Nav, MaxSpace, MultiScene };

const char* to_string(MapKind kind);
MapKind map_kind_from_string(std::string_view name);

// Cell values of the storage map. The same numbers are the rewards for
// entering the cell.
namespace storage {
inline constexpr int kWall = -100;
inline constexpr int kOpen = -1;
inline constexpr int kLargeBay = 100;
inline constexpr int kSmallBay = 10;
inline constexpr int kObject = 1;
}  // namespace storage

// Cell values of the navigation and multi-agent maps.
inline constexpr int kBlockedCell = 0;
inline constexpr int kOpenCell = 1;

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rectangular warehouse layout. `cells` is row-major. Marker fields are
/// populated according to `kind`:
///   Nav        - start, destination
///   MaxSpace   - start (the object cell)
///   MultiScene - agent_starts, destinations (same order), human_starts
struct GridMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<int> cells;
  MapKind kind = MapKind::Nav;

  Position start;
  Position destination;
  std::vector<Position> agent_starts;
  std::vector<Position> destinations;
  std::vector<Position> human_starts;

  int at(Position p) const { return cells[index(p)]; }
  int& at(Position p) { return cells[index(p)]; }
  std::size_t index(Position p) const { return p.row * width + p.col; }
  Position position_of(std::size_t cell) const { return {cell / width, cell % width}; }
  std::size_t size() const { return cells.size(); }
  bool contains(Position p) const { return p.row < height && p.col < width; }

  /// A cell the agent may stand on (not a wall or obstacle).
  bool is_open(Position p) const;
  /// A cell the agent may pass through without the episode ending there.
  bool is_transit(Position p) const;

  friend bool operator==(const GridMap&, const GridMap&) = default;
};

/// Parses any of the three text formats and validates the kind's invariants,
/// including reachability of every destination. Throws MapError.
GridMap parse_world(std::string_view text, MapKind kind);

/// Inverse of parse_world.
std::string serialize_world(const GridMap& map);

GridMap load_world(const std::filesystem::path& path, MapKind kind);
void save_world(const GridMap& map, const std::filesystem::path& path);

/// Re-checks the kind invariants on a programmatically built map.
void validate_world(const GridMap& map);

/// Position of the storage bay with the largest current capacity.
Position largest_bay(const GridMap& map);

}  // namespace warehouse
