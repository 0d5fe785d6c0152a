#include "warehouse/grid.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "warehouse/oracle.hpp"

namespace warehouse {

Action action_from_index(std::size_t i) {
  if (i >= kNumActions) throw std::out_of_range("action index out of range");
  return static_cast<Action>(i);
}

const char* to_string(Action a) {
  switch (a) {
    case Action::Up: return "up";
    case Action::Down: return "down";
    case Action::Left: return "left";
    case Action::Right: return "right";
  }
  return "?";
}

std::optional<Position> neighbor(Position p, Action a, std::size_t height,
                                 std::size_t width) {
  switch (a) {
    case Action::Up:
      if (p.row == 0) return std::nullopt;
      return Position{p.row - 1, p.col};
    case Action::Down:
      if (p.row + 1 >= height) return std::nullopt;
      return Position{p.row + 1, p.col};
    case Action::Left:
      if (p.col == 0) return std::nullopt;
      return Position{p.row, p.col - 1};
    case Action::Right:
      if (p.col + 1 >= width) return std::nullopt;
      return Position{p.row, p.col + 1};
  }
  return std::nullopt;
}

const char* to_string(MapKind kind) {
  switch (kind) {
    case MapKind::Nav: return "nav";
    case MapKind::MaxSpace: return "max-space";
    case MapKind::MultiScene: return "multi";
  }
  return "?";
}

MapKind map_kind_from_string(std::string_view name) {
  if (name == "nav" || name == "nav-dqn") return MapKind::Nav;
  if (name == "max-space") return MapKind::MaxSpace;
  if (name == "multi") return MapKind::MultiScene;
  throw std::invalid_argument("unknown map kind: " + std::string(name));
}

bool GridMap::is_open(Position p) const {
  if (!contains(p)) return false;
  if (kind == MapKind::MaxSpace) return at(p) != storage::kWall;
  return at(p) == kOpenCell;
}

bool GridMap::is_transit(Position p) const {
  if (!contains(p)) return false;
  if (kind == MapKind::MaxSpace) {
    const int v = at(p);
    return v == storage::kOpen || v == storage::kObject;
  }
  return at(p) == kOpenCell;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    begin = end + 1;
  }
  // Trailing newlines produce empty rows; a blank line inside the map is an
  // error caught by the rectangularity check.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string describe(Position p) {
  return "(" + std::to_string(p.row) + "," + std::to_string(p.col) + ")";
}

void require_reachable(const GridMap& map, Position from, Position to,
                       const std::string& what) {
  if (!bfs_shortest_path(map, from, to)) {
    throw MapError(what + " at " + describe(to) + " is unreachable from " +
                   describe(from));
  }
}

GridMap parse_character_map(const std::vector<std::string_view>& lines,
                            MapKind kind) {
  GridMap map;
  map.kind = kind;
  map.height = lines.size();
  map.width = lines.front().size();
  map.cells.reserve(map.height * map.width);

  std::optional<Position> start, dest;
  std::optional<Position> agent1, agent2, dest_a, dest_b;

  auto set_once = [](std::optional<Position>& slot, Position p, char symbol) {
    if (slot) throw MapError(std::string("duplicate '") + symbol + "' marker");
    slot = p;
  };

  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (lines[r].size() != map.width) {
      throw MapError("ragged map: row " + std::to_string(r) + " has " +
                     std::to_string(lines[r].size()) + " cells, expected " +
                     std::to_string(map.width));
    }
    for (std::size_t c = 0; c < map.width; ++c) {
      const char ch = lines[r][c];
      const Position p{r, c};
      int cell = kOpenCell;
      if (ch == '#') {
        cell = kBlockedCell;
      } else if (ch == '.') {
      } else if (kind == MapKind::Nav && ch == 'S') {
        set_once(start, p, ch);
      } else if (kind == MapKind::Nav && ch == 'D') {
        set_once(dest, p, ch);
      } else if (kind == MapKind::MultiScene && ch == '1') {
        set_once(agent1, p, ch);
      } else if (kind == MapKind::MultiScene && ch == '2') {
        set_once(agent2, p, ch);
      } else if (kind == MapKind::MultiScene && ch == 'A') {
        set_once(dest_a, p, ch);
      } else if (kind == MapKind::MultiScene && ch == 'B') {
        set_once(dest_b, p, ch);
      } else if (kind == MapKind::MultiScene && ch == 'h') {
        map.human_starts.push_back(p);
      } else {
        throw MapError(std::string("unknown map symbol '") + ch + "' at " +
                       describe(p));
      }
      map.cells.push_back(cell);
    }
  }

  if (kind == MapKind::Nav) {
    if (!start) throw MapError("missing start 'S'");
    if (!dest) throw MapError("missing destination 'D'");
    map.start = *start;
    map.destination = *dest;
  } else {
    if (!agent1 || !agent2) throw MapError("scene needs agent starts '1' and '2'");
    if (!dest_a || !dest_b) throw MapError("scene needs destinations 'A' and 'B'");
    map.agent_starts = {*agent1, *agent2};
    map.destinations = {*dest_a, *dest_b};
  }
  return map;
}

GridMap parse_storage_map(const std::vector<std::string_view>& lines) {
  GridMap map;
  map.kind = MapKind::MaxSpace;
  map.height = lines.size();
  for (std::size_t r = 0; r < lines.size(); ++r) {
    std::size_t columns = 0;
    std::string_view rest = lines[r];
    while (true) {
      const std::size_t comma = rest.find(',');
      std::string_view field = rest.substr(0, comma);
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      int value = 0;
      const auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw MapError("bad storage cell '" + std::string(field) + "' in row " +
                       std::to_string(r));
      }
      map.cells.push_back(value);
      ++columns;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (r == 0) {
      map.width = columns;
    } else if (columns != map.width) {
      throw MapError("ragged map: row " + std::to_string(r) + " has " +
                     std::to_string(columns) + " cells, expected " +
                     std::to_string(map.width));
    }
  }
  return map;
}

}  // namespace

void validate_world(const GridMap& map) {
  if (map.height == 0 || map.width == 0) throw MapError("empty map");
  if (map.cells.size() != map.height * map.width) {
    throw MapError("cell count does not match dimensions");
  }

  switch (map.kind) {
    case MapKind::Nav: {
      for (int v : map.cells) {
        if (v != kOpenCell && v != kBlockedCell) throw MapError("nav cells must be 0 or 1");
      }
      if (!map.is_open(map.start)) throw MapError("start is not on an open cell");
      if (!map.is_open(map.destination)) throw MapError("destination is not on an open cell");
      require_reachable(map, map.start, map.destination, "destination");
      break;
    }
    case MapKind::MaxSpace: {
      std::size_t objects = 0;
      bool has_bay = false;
      for (std::size_t i = 0; i < map.cells.size(); ++i) {
        const int v = map.cells[i];
        switch (v) {
          case storage::kWall:
          case storage::kOpen:
            break;
          case storage::kLargeBay:
          case storage::kSmallBay:
            has_bay = true;
            break;
          case storage::kObject:
            ++objects;
            break;
          default:
            throw MapError("storage cell value " + std::to_string(v) +
                           " is not one of -100, -1, 1, 10, 100");
        }
      }
      if (objects != 1) {
        throw MapError("storage map needs exactly one object cell (1), found " +
                       std::to_string(objects));
      }
      if (!has_bay) throw MapError("storage map has no capacity cell");
      const auto object = std::find(map.cells.begin(), map.cells.end(), storage::kObject);
      const Position start = map.position_of(static_cast<std::size_t>(object - map.cells.begin()));
      if (start != map.start) throw MapError("start marker does not match the object cell");
      require_reachable(map, map.start, largest_bay(map), "largest storage bay");
      break;
    }
    case MapKind::MultiScene: {
      for (int v : map.cells) {
        if (v != kOpenCell && v != kBlockedCell) throw MapError("scene cells must be 0 or 1");
      }
      if (map.agent_starts.empty()) throw MapError("scene has no agents");
      if (map.agent_starts.size() != map.destinations.size()) {
        throw MapError("every agent needs exactly one destination");
      }
      std::vector<Position> entities = map.agent_starts;
      entities.insert(entities.end(), map.destinations.begin(), map.destinations.end());
      entities.insert(entities.end(), map.human_starts.begin(), map.human_starts.end());
      for (std::size_t i = 0; i < entities.size(); ++i) {
        if (!map.is_open(entities[i])) {
          throw MapError("scene marker at " + describe(entities[i]) + " is not on an open cell");
        }
        for (std::size_t j = 0; j < i; ++j) {
          if (entities[i] == entities[j]) {
            throw MapError("two scene markers share cell " + describe(entities[i]));
          }
        }
      }
      for (std::size_t i = 0; i < map.agent_starts.size(); ++i) {
        require_reachable(map, map.agent_starts[i], map.destinations[i],
                          "destination of agent " + std::to_string(i + 1));
      }
      break;
    }
  }
}

GridMap parse_world(std::string_view text, MapKind kind) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front().empty()) throw MapError("empty map text");

  GridMap map;
  if (kind == MapKind::MaxSpace) {
    map = parse_storage_map(lines);
    const auto object = std::find(map.cells.begin(), map.cells.end(), storage::kObject);
    if (object != map.cells.end()) {
      map.start = map.position_of(static_cast<std::size_t>(object - map.cells.begin()));
    }
  } else {
    map = parse_character_map(lines, kind);
    if (kind == MapKind::MultiScene) {
      if (map.human_starts.size() != 2) {
        throw MapError("scene needs exactly two human starts 'h', found " +
                       std::to_string(map.human_starts.size()));
      }
    }
  }
  validate_world(map);
  return map;
}

std::string serialize_world(const GridMap& map) {
  std::string out;
  if (map.kind == MapKind::MaxSpace) {
    for (std::size_t r = 0; r < map.height; ++r) {
      for (std::size_t c = 0; c < map.width; ++c) {
        if (c) out += ',';
        out += std::to_string(map.at({r, c}));
      }
      out += '\n';
    }
    return out;
  }

  std::vector<char> symbols(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    symbols[i] = map.cells[i] == kOpenCell ? '.' : '#';
  }
  if (map.kind == MapKind::Nav) {
    symbols[map.index(map.start)] = 'S';
    symbols[map.index(map.destination)] = 'D';
  } else {
    static constexpr char kAgentSymbols[] = {'1', '2'};
    static constexpr char kDestSymbols[] = {'A', 'B'};
    for (std::size_t i = 0; i < map.agent_starts.size() && i < 2; ++i) {
      symbols[map.index(map.agent_starts[i])] = kAgentSymbols[i];
      symbols[map.index(map.destinations[i])] = kDestSymbols[i];
    }
    for (const auto& h : map.human_starts) symbols[map.index(h)] = 'h';
  }
  for (std::size_t r = 0; r < map.height; ++r) {
    out.append(symbols.begin() + static_cast<std::ptrdiff_t>(r * map.width),
               symbols.begin() + static_cast<std::ptrdiff_t>((r + 1) * map.width));
    out += '\n';
  }
  return out;
}

GridMap load_world(const std::filesystem::path& path, MapKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MapError("cannot open map file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_world(buffer.str(), kind);
}

void save_world(const GridMap& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write map file " + path.string());
  out << serialize_world(map);
}

Position largest_bay(const GridMap& map) {
  std::optional<Position> best;
  int best_value = 0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const int v = map.cells[i];
    if ((v == storage::kLargeBay || v == storage::kSmallBay) && (!best || v > best_value)) {
      best = map.position_of(i);
      best_value = v;
    }
  }
  if (!best) throw MapError("storage map has no capacity cell");
  return *best;
}

}  // namespace warehouse
