#include "edgecbf/scenario.hpp"

#include "edgecbf/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

namespace edgecbf {

using json = nlohmann::json;

namespace {

bool same(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

}  // namespace

bool SetSpec::operator==(const SetSpec& o) const {
  return type == o.type && same(lo, o.lo) && same(hi, o.hi) && same(A, o.A) && same(b, o.b) &&
         same(center, o.center) && same(shape, o.shape);
}

bool Scenario::operator==(const Scenario& o) const {
  return name == o.name && robot == o.robot && sets == o.sets && grid == o.grid &&
         start_base == o.start_base && same(start_angles, o.start_angles) && goal == o.goal &&
         control == o.control && seed == o.seed && base_dir == o.base_dir;
}

namespace {

// ---------------------------------------------------------------------------
// JSON pointer -> source line, recorded by a SAX pass over a position-tracking
// iterator.

class TrackingIterator {
 public:
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  TrackingIterator() = default;
  TrackingIterator(const char* p, const char** cursor) : p_(p), cursor_(cursor) {}

  reference operator*() const { return *p_; }
  TrackingIterator& operator++() {
    ++p_;
    if (cursor_) *cursor_ = p_;
    return *this;
  }
  TrackingIterator operator++(int) {
    TrackingIterator t = *this;
    ++*this;
    return t;
  }
  bool operator==(const TrackingIterator& o) const { return p_ == o.p_; }

 private:
  const char* p_ = nullptr;
  const char** cursor_ = nullptr;
};

class LineIndex {
 public:
  explicit LineIndex(const std::string& text) {
    starts_.push_back(0);
    for (std::size_t i = 0; i < text.size(); ++i)
      if (text[i] == '\n') starts_.push_back(i + 1);
  }
  // 1-based line and column of a byte offset.
  std::pair<std::size_t, std::size_t> locate(std::size_t offset) const {
    const auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
    const std::size_t line = static_cast<std::size_t>(it - starts_.begin());
    return {line, offset - starts_[line - 1] + 1};
  }

 private:
  std::vector<std::size_t> starts_;
};

class PointerLines : public nlohmann::json_sax<json> {
 public:
  PointerLines(const char* begin, const char* const* cursor, const LineIndex& index)
      : begin_(begin), cursor_(cursor), index_(index) {}

  std::map<std::string, std::size_t> lines;

  bool null() override { return scalar(); }
  bool boolean(bool) override { return scalar(); }
  bool number_integer(number_integer_t) override { return scalar(); }
  bool number_unsigned(number_unsigned_t) override { return scalar(); }
  bool number_float(number_float_t, const string_t&) override { return scalar(); }
  bool string(string_t&) override { return scalar(); }
  bool binary(binary_t&) override { return scalar(); }
  bool start_object(std::size_t) override {
    mark();
    stack_.push_back({false, 0, {}});
    return true;
  }
  bool key(string_t& k) override {
    stack_.back().key = k;
    return true;
  }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override {
    mark();
    stack_.push_back({true, 0, {}});
    return true;
  }
  bool end_array() override { return close(); }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
    return false;
  }

 private:
  struct Frame {
    bool array;
    std::size_t index;
    std::string key;
  };

  std::string pointer() const {
    std::string p;
    for (const Frame& f : stack_) {
      p += '/';
      if (f.array) {
        p += std::to_string(f.index);
      } else {
        for (char c : f.key) p += c == '~' ? "~0" : c == '/' ? "~1" : std::string(1, c);
      }
    }
    return p;
  }
  void mark() {
    const std::size_t off = static_cast<std::size_t>(*cursor_ - begin_);
    lines.emplace(pointer(), index_.locate(off > 0 ? off - 1 : 0).first);
  }
  void advance() {
    if (!stack_.empty() && stack_.back().array) ++stack_.back().index;
  }
  bool scalar() {
    mark();
    advance();
    return true;
  }
  bool close() {
    stack_.pop_back();
    advance();
    return true;
  }

  const char* begin_;
  const char* const* cursor_;
  const LineIndex& index_;
  std::vector<Frame> stack_;
};

// ---------------------------------------------------------------------------
// Schema reader

class Reader {
 public:
  Reader(std::string source, std::map<std::string, std::size_t> lines)
      : source_(std::move(source)), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    std::string where = source_;
    if (auto it = lines_.find(ptr); it != lines_.end()) where += ":" + std::to_string(it->second);
    throw InputError(where + ": " + (ptr.empty() ? "/" : ptr) + ": " + msg);
  }

  const json& member(const json& obj, const std::string& ptr, const char* key) const {
    if (!obj.contains(key)) fail(ptr, std::string("missing required field '") + key + "'");
    return obj.at(key);
  }

  void only(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(ptr, "expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
      if (!allowed.count(k)) fail(ptr + "/" + k, "unknown field");
  }

  double number(const json& j, const std::string& ptr) const {
    if (!j.is_number()) fail(ptr, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(ptr, "must be finite");
    return v;
  }

  long long integer(const json& j, const std::string& ptr) const {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    return j.get<long long>();
  }

  bool boolean(const json& j, const std::string& ptr) const {
    if (!j.is_boolean()) fail(ptr, "expected true or false");
    return j.get<bool>();
  }

  std::string string(const json& j, const std::string& ptr) const {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
  }

  Eigen::VectorXd vector(const json& j, const std::string& ptr, int size = -1) const {
    if (!j.is_array()) fail(ptr, "expected an array of numbers");
    if (size >= 0 && static_cast<int>(j.size()) != size)
      fail(ptr, "expected " + std::to_string(size) + " entries, got " + std::to_string(j.size()));
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
      v(static_cast<Eigen::Index>(i)) = number(j[i], ptr + "/" + std::to_string(i));
    return v;
  }

  Eigen::MatrixXd matrix(const json& j, const std::string& ptr) const {
    if (!j.is_array() || j.empty()) fail(ptr, "expected a non-empty array of rows");
    const std::string first = ptr + "/0";
    if (!j[0].is_array() || j[0].empty()) fail(first, "expected a non-empty row");
    const int cols = static_cast<int>(j[0].size());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r)
      m.row(static_cast<Eigen::Index>(r)) = vector(j[r], ptr + "/" + std::to_string(r), cols);
    return m;
  }

 private:
  std::string source_;
  std::map<std::string, std::size_t> lines_;
};

DHRow read_dh_row(const Reader& rd, const json& j, const std::string& ptr) {
  rd.only(j, ptr, {"theta_offset", "d", "a", "alpha", "min_angle", "max_angle"});
  DHRow row;
  row.theta_offset = rd.number(rd.member(j, ptr, "theta_offset"), ptr + "/theta_offset");
  row.d = rd.number(rd.member(j, ptr, "d"), ptr + "/d");
  row.a = rd.number(rd.member(j, ptr, "a"), ptr + "/a");
  row.alpha = rd.number(rd.member(j, ptr, "alpha"), ptr + "/alpha");
  row.min_angle = rd.number(rd.member(j, ptr, "min_angle"), ptr + "/min_angle");
  row.max_angle = rd.number(rd.member(j, ptr, "max_angle"), ptr + "/max_angle");
  if (!(row.min_angle < row.max_angle)) rd.fail(ptr, "min_angle must be below max_angle");
  return row;
}

int frame_from_name(const Reader& rd, const std::string& name, const std::string& ptr) {
  if (name == "base") return 0;
  if (name.size() == 2 && name[0] == 'J' && name[1] >= '1' && name[1] <= '6') return name[1] - '0';
  rd.fail(ptr, "unknown edge point '" + name + "' (expected base or J1..J6)");
}

std::string frame_name(int f) { return f == 0 ? "base" : "J" + std::to_string(f); }

RobotSpec read_robot(const Reader& rd, const json& j, const std::string& ptr) {
  RobotSpec r;
  const std::string type = rd.string(rd.member(j, ptr, "type"), ptr + "/type");
  if (type == "rod") {
    rd.only(j, ptr, {"type", "length"});
    r.type = RobotSpec::Type::Rod;
    r.length = rd.number(rd.member(j, ptr, "length"), ptr + "/length");
    if (!(r.length > 0.0)) rd.fail(ptr + "/length", "must be positive");
    return r;
  }
  if (type != "mobile_arm") rd.fail(ptr + "/type", "expected \"rod\" or \"mobile_arm\"");
  rd.only(j, ptr, {"type", "dh", "active_joints", "camera_mount", "edge_points"});
  r.type = RobotSpec::Type::MobileArm;

  const json& dh = rd.member(j, ptr, "dh");
  if (!dh.is_array() || dh.size() != 6) rd.fail(ptr + "/dh", "expected an array of 6 DH rows");
  for (std::size_t i = 0; i < dh.size(); ++i)
    r.dh.push_back(read_dh_row(rd, dh[i], ptr + "/dh/" + std::to_string(i)));

  const std::string aptr = ptr + "/active_joints";
  r.active_joints = static_cast<int>(rd.integer(rd.member(j, ptr, "active_joints"), aptr));
  if (r.active_joints < 1 || r.active_joints > 4) rd.fail(aptr, "must be between 1 and 4");

  if (j.contains("camera_mount")) {
    const std::string cptr = ptr + "/camera_mount";
    const json& c = j.at("camera_mount");
    rd.only(c, cptr, {"l1", "l2", "theta"});
    CameraMount m;
    m.l1 = rd.number(rd.member(c, cptr, "l1"), cptr + "/l1");
    m.l2 = rd.number(rd.member(c, cptr, "l2"), cptr + "/l2");
    m.theta = rd.number(rd.member(c, cptr, "theta"), cptr + "/theta");
    r.camera_mount = m;
  }

  if (j.contains("edge_points")) {
    const std::string eptr = ptr + "/edge_points";
    const json& e = j.at("edge_points");
    if (e.is_string()) {
      r.edge_points = e.get<std::string>();
      if (r.edge_points != "all" && r.edge_points != "by_active_joints")
        rd.fail(eptr, "expected \"all\", \"by_active_joints\" or a list of frame names");
    } else if (e.is_array() && !e.empty()) {
      r.edge_points = "list";
      for (std::size_t i = 0; i < e.size(); ++i) {
        const std::string p = eptr + "/" + std::to_string(i);
        r.edge_frames.push_back(frame_from_name(rd, rd.string(e[i], p), p));
      }
    } else {
      rd.fail(eptr, "expected \"all\", \"by_active_joints\" or a list of frame names");
    }
  }
  return r;
}

SetSpec read_set(const Reader& rd, const json& j, const std::string& ptr) {
  SetSpec s;
  const std::string type = rd.string(rd.member(j, ptr, "type"), ptr + "/type");
  if (type == "box") {
    rd.only(j, ptr, {"type", "min", "max"});
    s.type = SetSpec::Type::Box;
    s.lo = rd.vector(rd.member(j, ptr, "min"), ptr + "/min");
    s.hi = rd.vector(rd.member(j, ptr, "max"), ptr + "/max", static_cast<int>(s.lo.size()));
  } else if (type == "polytope") {
    rd.only(j, ptr, {"type", "A", "b"});
    s.type = SetSpec::Type::Polytope;
    s.A = rd.matrix(rd.member(j, ptr, "A"), ptr + "/A");
    s.b = rd.vector(rd.member(j, ptr, "b"), ptr + "/b", static_cast<int>(s.A.rows()));
  } else if (type == "ellipsoid") {
    rd.only(j, ptr, {"type", "center", "shape"});
    s.type = SetSpec::Type::Ellipsoid;
    s.center = rd.vector(rd.member(j, ptr, "center"), ptr + "/center");
    s.shape = rd.matrix(rd.member(j, ptr, "shape"), ptr + "/shape");
  } else {
    rd.fail(ptr + "/type", "expected \"box\", \"polytope\" or \"ellipsoid\"");
  }
  return s;
}

ControlSpec read_control(const Reader& rd, const json& j, const std::string& ptr) {
  rd.only(j, ptr, {"k_p", "gamma", "lambda_dls", "dt", "max_steps", "margin", "goal_tol",
                   "joint_limit_cbf", "infeasibility_policy", "record_every",
                   "workspace_resolution"});
  ControlSpec c;
  const auto num = [&](const char* key, double& out) {
    if (j.contains(key)) out = rd.number(j.at(key), ptr + "/" + key);
  };
  const auto count = [&](const char* key, int& out, int min) {
    if (!j.contains(key)) return;
    const long long v = rd.integer(j.at(key), ptr + "/" + key);
    if (v < min || v > 1'000'000'000) rd.fail(ptr + "/" + key, "must be at least " + std::to_string(min));
    out = static_cast<int>(v);
  };
  num("k_p", c.k_p);
  num("gamma", c.gamma);
  num("lambda_dls", c.lambda_dls);
  num("dt", c.dt);
  num("margin", c.margin);
  num("goal_tol", c.goal_tol);
  count("max_steps", c.max_steps, 1);
  count("record_every", c.record_every, 1);
  count("workspace_resolution", c.workspace_resolution, 2);
  if (j.contains("joint_limit_cbf"))
    c.joint_limit_cbf = rd.boolean(j.at("joint_limit_cbf"), ptr + "/joint_limit_cbf");
  if (j.contains("infeasibility_policy")) {
    const std::string p = rd.string(j.at("infeasibility_policy"), ptr + "/infeasibility_policy");
    if (p == "halt") c.infeasibility_policy = InfeasibilityPolicy::Halt;
    else if (p == "zero_input") c.infeasibility_policy = InfeasibilityPolicy::ZeroInput;
    else rd.fail(ptr + "/infeasibility_policy", "expected \"halt\" or \"zero_input\"");
  }
  if (!(c.k_p > 0.0)) rd.fail(ptr + "/k_p", "must be positive");
  if (!(c.gamma > 0.0)) rd.fail(ptr + "/gamma", "must be positive");
  if (!(c.lambda_dls >= 0.0)) rd.fail(ptr + "/lambda_dls", "must be non-negative");
  if (!(c.dt > 0.0)) rd.fail(ptr + "/dt", "must be positive");
  if (!(c.margin >= 0.0 && c.margin < 1.0)) rd.fail(ptr + "/margin", "must lie in [0, 1)");
  if (!(c.goal_tol > 0.0)) rd.fail(ptr + "/goal_tol", "must be positive");
  return c;
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
  return a;
}

ConvexSet make_set(const SetSpec& s) {
  switch (s.type) {
    case SetSpec::Type::Box: return ConvexSet::box(s.lo, s.hi);
    case SetSpec::Type::Polytope: return ConvexSet::polytope(s.A, s.b);
    case SetSpec::Type::Ellipsoid: return ConvexSet::ellipsoid(s.center, s.shape);
  }
  throw InputError("unknown set type");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source_name,
                        const std::filesystem::path& base_dir) {
  const LineIndex index(text);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = index.locate(e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    if (auto p = what.find("parse error"); p != std::string::npos) what = what.substr(p);
    throw InputError(source_name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }

  const char* cursor = text.data();
  PointerLines lines(text.data(), &cursor, index);
  json::sax_parse(TrackingIterator(text.data(), &cursor),
                  TrackingIterator(text.data() + text.size(), &cursor), &lines);
  const Reader rd(source_name, std::move(lines.lines));

  rd.only(doc, "", {"name", "robot", "corridor", "start", "goal", "control", "seed"});
  Scenario s;
  s.base_dir = base_dir;
  if (doc.contains("name")) s.name = rd.string(doc.at("name"), "/name");
  s.robot = read_robot(rd, rd.member(doc, "", "robot"), "/robot");

  const json& cor = rd.member(doc, "", "corridor");
  rd.only(cor, "/corridor", {"sets", "grid"});
  if (cor.contains("sets") == cor.contains("grid"))
    rd.fail("/corridor", "expected exactly one of 'sets' or 'grid'");
  if (cor.contains("sets")) {
    const json& sets = cor.at("sets");
    if (!sets.is_array() || sets.empty()) rd.fail("/corridor/sets", "expected a non-empty array");
    for (std::size_t i = 0; i < sets.size(); ++i)
      s.sets.push_back(read_set(rd, sets[i], "/corridor/sets/" + std::to_string(i)));
  } else {
    const json& g = cor.at("grid");
    rd.only(g, "/corridor/grid", {"file", "cell_size"});
    GridSpec grid;
    grid.file = rd.string(rd.member(g, "/corridor/grid", "file"), "/corridor/grid/file");
    grid.cell_size = rd.number(rd.member(g, "/corridor/grid", "cell_size"), "/corridor/grid/cell_size");
    if (!(grid.cell_size > 0.0)) rd.fail("/corridor/grid/cell_size", "must be positive");
    if (!std::filesystem::exists(base_dir / grid.file))
      rd.fail("/corridor/grid/file", "file not found: " + (base_dir / grid.file).string());
    s.grid = grid;
  }

  const json& start = rd.member(doc, "", "start");
  rd.only(start, "/start", {"base", "angles"});
  s.start_base = rd.vector(rd.member(start, "/start", "base"), "/start/base", 2);
  const int angles = s.robot.type == RobotSpec::Type::Rod ? 1 : 6;
  s.start_angles = rd.vector(rd.member(start, "/start", "angles"), "/start/angles", angles);
  if (s.robot.type == RobotSpec::Type::MobileArm)
    for (int i = 0; i < angles; ++i) {
      const DHRow& row = s.robot.dh[static_cast<std::size_t>(i)];
      if (s.start_angles(i) < row.min_angle || s.start_angles(i) > row.max_angle)
        rd.fail("/start/angles/" + std::to_string(i), "outside the joint limits");
    }

  s.goal = rd.vector(rd.member(doc, "", "goal"), "/goal", 3);
  if (doc.contains("control")) s.control = read_control(rd, doc.at("control"), "/control");
  if (doc.contains("seed")) {
    const json& seed = doc.at("seed");
    if (!seed.is_number_unsigned()) rd.fail("/seed", "expected a non-negative integer");
    s.seed = seed.get<std::uint64_t>();
  }

  for (std::size_t i = 0; i < s.sets.size(); ++i) {
    try {
      (void)make_set(s.sets[i]);
    } catch (const Error& e) {
      rd.fail("/corridor/sets/" + std::to_string(i), e.what());
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.string(), path.parent_path());
}

std::string scenario_to_json(const Scenario& s) {
  json doc;
  if (!s.name.empty()) doc["name"] = s.name;

  json robot;
  if (s.robot.type == RobotSpec::Type::Rod) {
    robot["type"] = "rod";
    robot["length"] = s.robot.length;
  } else {
    robot["type"] = "mobile_arm";
    json dh = json::array();
    for (const DHRow& r : s.robot.dh)
      dh.push_back({{"theta_offset", r.theta_offset}, {"d", r.d}, {"a", r.a}, {"alpha", r.alpha},
                    {"min_angle", r.min_angle}, {"max_angle", r.max_angle}});
    robot["dh"] = dh;
    robot["active_joints"] = s.robot.active_joints;
    if (s.robot.camera_mount)
      robot["camera_mount"] = {{"l1", s.robot.camera_mount->l1},
                               {"l2", s.robot.camera_mount->l2},
                               {"theta", s.robot.camera_mount->theta}};
    if (s.robot.edge_points == "list") {
      json names = json::array();
      for (int f : s.robot.edge_frames) names.push_back(frame_name(f));
      robot["edge_points"] = names;
    } else {
      robot["edge_points"] = s.robot.edge_points;
    }
  }
  doc["robot"] = robot;

  json corridor;
  if (s.grid) {
    corridor["grid"] = {{"file", s.grid->file}, {"cell_size", s.grid->cell_size}};
  } else {
    json sets = json::array();
    for (const SetSpec& set : s.sets) {
      switch (set.type) {
        case SetSpec::Type::Box:
          sets.push_back({{"type", "box"}, {"min", vec_json(set.lo)}, {"max", vec_json(set.hi)}});
          break;
        case SetSpec::Type::Polytope:
          sets.push_back({{"type", "polytope"}, {"A", mat_json(set.A)}, {"b", vec_json(set.b)}});
          break;
        case SetSpec::Type::Ellipsoid:
          sets.push_back({{"type", "ellipsoid"},
                          {"center", vec_json(set.center)},
                          {"shape", mat_json(set.shape)}});
          break;
      }
    }
    corridor["sets"] = sets;
  }
  doc["corridor"] = corridor;

  doc["start"] = {{"base", vec_json(s.start_base)}, {"angles", vec_json(s.start_angles)}};
  doc["goal"] = vec_json(s.goal);

  const ControlSpec& c = s.control;
  doc["control"] = {{"k_p", c.k_p},
                    {"gamma", c.gamma},
                    {"lambda_dls", c.lambda_dls},
                    {"dt", c.dt},
                    {"max_steps", c.max_steps},
                    {"margin", c.margin},
                    {"goal_tol", c.goal_tol},
                    {"joint_limit_cbf", c.joint_limit_cbf},
                    {"infeasibility_policy",
                     c.infeasibility_policy == InfeasibilityPolicy::Halt ? "halt" : "zero_input"},
                    {"record_every", c.record_every},
                    {"workspace_resolution", c.workspace_resolution}};
  if (s.seed) doc["seed"] = *s.seed;
  return doc.dump(2) + "\n";
}

RobotModel build_model(const Scenario& s) {
  if (s.robot.type == RobotSpec::Type::Rod) return RobotModel::planar_rod(s.robot.length);
  std::vector<int> edges;
  if (s.robot.edge_points == "all")
    edges = RobotModel::all_edge_frames(s.robot.dh.size());
  else if (s.robot.edge_points == "by_active_joints")
    edges = RobotModel::edge_frames_for_active(s.robot.dh.size(), s.robot.active_joints);
  else
    edges = s.robot.edge_frames;
  return RobotModel::mobile_arm(s.robot.dh, s.robot.active_joints, std::move(edges));
}

Configuration start_configuration(const Scenario& s) {
  Configuration q;
  q.base = s.start_base;
  q.angles = s.start_angles;
  return q;
}

SimConfig sim_config(const Scenario& s) {
  SimConfig cfg;
  const ControlSpec& c = s.control;
  cfg.dt = c.dt;
  cfg.max_steps = c.max_steps;
  cfg.goal_tol = c.goal_tol;
  cfg.margin = c.margin;
  cfg.record_every = c.record_every;
  cfg.workspace_resolution = c.workspace_resolution;
  cfg.safety.k_p = c.k_p;
  cfg.safety.kappa.gamma = c.gamma;
  cfg.safety.lambda_dls = c.lambda_dls;
  cfg.safety.policy = c.infeasibility_policy;
  cfg.safety.joint_limit_cbf = c.joint_limit_cbf;
  return cfg;
}

Corridor build_corridor(const Scenario& s) {
  Corridor corridor;
  if (s.grid) {
    const std::filesystem::path file = s.base_dir / s.grid->file;
    const OccupancyGrid grid = OccupancyGrid::parse(read_file(file), s.grid->cell_size);
    const auto cell_of = [&](const Eigen::Vector2d& p, const char* what) {
      const GridCell c = grid.cell_at(p);
      if (!grid.is_free(c.row, c.col))
        throw NoPathError(std::string(what) + " cell (" + std::to_string(c.row) + "," +
                          std::to_string(c.col) + ") of " + file.string() +
                          " is blocked or outside the grid");
      return c;
    };
    corridor = grid_maze_decompose(grid, cell_of(s.start_base, "start"),
                                   cell_of(s.goal.head<2>(), "goal"));
  } else {
    for (const SetSpec& set : s.sets) corridor.sets.push_back(make_set(set));
  }
  corridor.goal = s.goal;
  return corridor;
}

}  // namespace edgecbf
