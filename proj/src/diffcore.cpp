// Copyright 2026 The unisum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "diffcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "common.hpp"

namespace unisum {

std::string Shape::str() const {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < rank; ++i) os << (i ? "," : "") << dims[static_cast<std::size_t>(i)];
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(s), data(std::move(values)) {
  if (data.size() != shape.size())
    throw ShapeError("tensor of shape " + shape.str() + " given " + std::to_string(data.size()) + " values");
}

Tensor Tensor::vec(std::vector<double> values) {
  int n = static_cast<int>(values.size());
  return Tensor(Shape::vec(n), std::move(values));
}

Tensor Tensor::mat(int rows, int cols, std::vector<double> values) {
  return Tensor(Shape::mat(rows, cols), std::move(values));
}

int ParamSet::add(std::string name, Tensor init) {
  if (index_.count(name)) throw ConfigError("duplicate parameter " + name);
  int id = static_cast<int>(tensors_.size());
  index_.emplace(name, id);
  names_.push_back(std::move(name));
  tensors_.push_back(std::move(init));
  return id;
}

int ParamSet::id(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw DataError("unknown parameter " + std::string(name));
  return it->second;
}

bool ParamSet::contains(std::string_view name) const { return index_.count(std::string(name)) > 0; }

std::size_t ParamSet::num_values() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

GradSet zeros_like(const ParamSet& params) {
  GradSet g;
  g.reserve(static_cast<std::size_t>(params.size()));
  for (int i = 0; i < params.size(); ++i) g.emplace_back(params[i].shape, 0.0);
  return g;
}

const char* op_name(Op op) {
  switch (op) {
    case Op::kParam: return "param";
    case Op::kConstant: return "constant";
    case Op::kLookup: return "lookup";
    case Op::kMatMul: return "matmul";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kDiv: return "div";
    case Op::kSigmoid: return "sigmoid";
    case Op::kTanh: return "tanh";
    case Op::kSoftmax: return "softmax";
    case Op::kLog: return "log";
    case Op::kConcat: return "concat";
    case Op::kSlice: return "slice";
    case Op::kGather: return "gather";
    case Op::kScatterAdd: return "scatter_add";
    case Op::kSum: return "sum";
    case Op::kMean: return "mean";
    case Op::kMin: return "min";
    case Op::kScale: return "scale";
    case Op::kAddScalar: return "add_scalar";
    case Op::kStack: return "stack";
    case Op::kReshape: return "reshape";
  }
  return "?";
}

const Tensor& Var::value() const { return graph->value(id); }

Graph::Graph(const ParamSet* params) : params_(params) { nodes_.reserve(1024); }

const Tensor& Graph::value(int node) const {
  const Node& n = nodes_.at(static_cast<std::size_t>(node));
  if (n.op == Op::kParam) return (*params_)[n.param];
  return n.value;
}

void Graph::check_finite(const Node& node, std::size_t id) const {
  for (double v : node.value.data)
    if (!std::isfinite(v))
      throw NumericError("non-finite value produced by node " + std::to_string(id) + " (" + op_name(node.op) + ")");
}

Var Graph::push(Node node) {
  check_finite(node, nodes_.size());
  nodes_.push_back(std::move(node));
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

Var Graph::param(int id) {
  if (!params_ || id < 0 || id >= params_->size()) throw ShapeError("graph has no parameter " + std::to_string(id));
  auto it = param_nodes_.find(id);
  if (it != param_nodes_.end()) return Var{this, it->second};
  Node n{};
  n.op = Op::kParam;
  n.param = id;
  n.value = Tensor(Shape::scalar());
  nodes_.push_back(std::move(n));
  int node = static_cast<int>(nodes_.size() - 1);
  param_nodes_.emplace(id, node);
  return Var{this, node};
}

Var Graph::param(std::string_view name) {
  if (!params_) throw ShapeError("graph has no parameters");
  return param(params_->id(name));
}

Var Graph::constant(Tensor value) {
  Node n{};
  n.op = Op::kConstant;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Graph::lookup(int param_id, int row) {
  if (!params_ || param_id < 0 || param_id >= params_->size()) throw ShapeError("lookup: no such parameter");
  const Tensor& table = (*params_)[param_id];
  if (table.shape.rank != 2) throw ShapeError("lookup: parameter " + params_->name(param_id) + " is not a matrix");
  if (row < 0 || row >= table.shape.rows())
    throw ShapeError("lookup: row " + std::to_string(row) + " outside " + params_->name(param_id) + table.shape.str());
  Node n{};
  n.op = Op::kLookup;
  n.param = param_id;
  n.index = {row};
  const int cols = table.shape.cols();
  n.value = Tensor(Shape::vec(cols));
  std::copy_n(table.data.begin() + static_cast<std::ptrdiff_t>(row) * cols, cols, n.value.data.begin());
  return push(std::move(n));
}

struct OpBuilder {
  using Node = Graph::Node;

  static Graph& same_graph(Var a, Var b) {
    if (!a.valid() || !b.valid() || a.graph != b.graph) throw ShapeError("operands belong to different graphs");
    return *a.graph;
  }
  static Var push(Graph& g, Node n) { return g.push(std::move(n)); }
  static Node unary(Op op, Var a, Tensor value) {
    Node n{};
    n.op = op;
    n.in = {a.id, -1};
    n.value = std::move(value);
    return n;
  }
  static Node binary(Op op, Var a, Var b, Tensor value) {
    Node n{};
    n.op = op;
    n.in = {a.id, b.id};
    n.value = std::move(value);
    return n;
  }
  static const Node& node(const Graph& g, int id) { return g.nodes_[static_cast<std::size_t>(id)]; }
  static std::vector<Node>& nodes(Graph& g) { return g.nodes_; }
};

namespace {

using Node = OpBuilder::Node;

bool is_scalar(const Shape& s) { return s.size() == 1; }

// Matrix view of a matmul operand: rank-1 left operands are rows, rank-1
// right operands are columns.
struct MatDims {
  int m, k, n;
};

MatDims matmul_dims(const Shape& a, const Shape& b) {
  if (a.rank == 0 || b.rank == 0) throw ShapeError("matmul: scalar operand");
  if (a.rank == 1 && b.rank == 1) throw ShapeError("matmul: two vectors " + a.str() + " x " + b.str());
  int m = a.rank == 2 ? a.dims[0] : 1;
  int ka = a.rank == 2 ? a.dims[1] : a.dims[0];
  int kb = b.dims[0];
  int n = b.rank == 2 ? b.dims[1] : 1;
  if (ka != kb) throw ShapeError("matmul: inner dimensions differ " + a.str() + " x " + b.str());
  return {m, ka, n};
}

// Broadcast mode of the right operand of add/sub/mul.
enum class Bcast { kNone, kRow, kScalar };

Bcast broadcast_mode(const Shape& a, const Shape& b, bool allow_row, const char* op) {
  if (a == b) return Bcast::kNone;
  if (is_scalar(b)) return Bcast::kScalar;
  if (allow_row && a.rank == 2 && b.rank == 1 && b.dims[0] == a.dims[1]) return Bcast::kRow;
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.str() + " and " + b.str());
}

template <typename F>
Tensor map_unary(const Tensor& a, F f) {
  Tensor out(a.shape);
  for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = f(a.data[i]);
  return out;
}

template <typename F>
Tensor map_binary(const Tensor& a, const Tensor& b, Bcast mode, F f) {
  Tensor out(a.shape);
  const std::size_t cols = static_cast<std::size_t>(a.shape.cols());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double bv = mode == Bcast::kNone ? b.data[i] : (mode == Bcast::kScalar ? b.data[0] : b.data[i % cols]);
    out.data[i] = f(a.data[i], bv);
  }
  return out;
}

int bcast_code(Bcast b) { return static_cast<int>(b); }
Bcast bcast_of(const Node& n) { return static_cast<Bcast>(static_cast<int>(n.scalar)); }

void require_rank1(const Shape& s, const char* op) {
  if (s.rank > 1) throw ShapeError(std::string(op) + ": expected a vector, got " + s.str());
}

}  // namespace

Var matmul(Var a, Var b) {
  Graph& g = OpBuilder::same_graph(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  MatDims d = matmul_dims(A.shape, B.shape);
  Shape out_shape = A.shape.rank == 2 && B.shape.rank == 2 ? Shape::mat(d.m, d.n)
                    : A.shape.rank == 1                  ? Shape::vec(d.n)
                                                         : Shape::vec(d.m);
  Tensor C(out_shape);
  for (int i = 0; i < d.m; ++i) {
    double* crow = C.data.data() + static_cast<std::ptrdiff_t>(i) * d.n;
    const double* arow = A.data.data() + static_cast<std::ptrdiff_t>(i) * d.k;
    for (int p = 0; p < d.k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = B.data.data() + static_cast<std::ptrdiff_t>(p) * d.n;
      for (int j = 0; j < d.n; ++j) crow[j] += av * brow[j];
    }
  }
  return OpBuilder::push(g, OpBuilder::binary(Op::kMatMul, a, b, std::move(C)));
}

Var add(Var a, Var b) {
  Graph& g = OpBuilder::same_graph(a, b);
  Bcast mode = broadcast_mode(a.shape(), b.shape(), true, "add");
  Node n = OpBuilder::binary(Op::kAdd, a, b, map_binary(a.value(), b.value(), mode, [](double x, double y) { return x + y; }));
  n.scalar = bcast_code(mode);
  return OpBuilder::push(g, std::move(n));
}

Var sub(Var a, Var b) {
  Graph& g = OpBuilder::same_graph(a, b);
  Bcast mode = broadcast_mode(a.shape(), b.shape(), false, "sub");
  Node n = OpBuilder::binary(Op::kSub, a, b, map_binary(a.value(), b.value(), mode, [](double x, double y) { return x - y; }));
  n.scalar = bcast_code(mode);
  return OpBuilder::push(g, std::move(n));
}

Var mul(Var a, Var b) {
  Graph& g = OpBuilder::same_graph(a, b);
  Bcast mode = broadcast_mode(a.shape(), b.shape(), false, "mul");
  Node n = OpBuilder::binary(Op::kMul, a, b, map_binary(a.value(), b.value(), mode, [](double x, double y) { return x * y; }));
  n.scalar = bcast_code(mode);
  return OpBuilder::push(g, std::move(n));
}

Var div(Var a, Var s) {
  Graph& g = OpBuilder::same_graph(a, s);
  if (!is_scalar(s.shape())) throw ShapeError("div: divisor must be scalar, got " + s.shape().str());
  const double d = s.item();
  return OpBuilder::push(g, OpBuilder::binary(Op::kDiv, a, s, map_unary(a.value(), [d](double x) { return x / d; })));
}

Var sigmoid(Var a) {
  return OpBuilder::push(*a.graph, OpBuilder::unary(Op::kSigmoid, a, map_unary(a.value(), [](double x) {
                                                      return x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                                                                    : std::exp(x) / (1.0 + std::exp(x));
                                                    })));
}

Var tanh(Var a) {
  return OpBuilder::push(*a.graph,
                         OpBuilder::unary(Op::kTanh, a, map_unary(a.value(), [](double x) { return std::tanh(x); })));
}

Var softmax(Var a) {
  const Tensor& x = a.value();
  Tensor y(x.shape);
  const int rows = x.shape.rank == 2 ? x.shape.rows() : 1;
  const int cols = static_cast<int>(x.size()) / rows;
  for (int r = 0; r < rows; ++r) {
    const double* in = x.data.data() + static_cast<std::ptrdiff_t>(r) * cols;
    double* out = y.data.data() + static_cast<std::ptrdiff_t>(r) * cols;
    double mx = *std::max_element(in, in + cols);
    long double z = 0.0L;
    for (int j = 0; j < cols; ++j) z += (out[j] = std::exp(in[j] - mx));
    for (int j = 0; j < cols; ++j) out[j] = static_cast<double>(out[j] / z);
  }
  return OpBuilder::push(*a.graph, OpBuilder::unary(Op::kSoftmax, a, std::move(y)));
}

Var log(Var a) {
  return OpBuilder::push(*a.graph, OpBuilder::unary(Op::kLog, a, map_unary(a.value(), [](double x) {
                                                      return std::log(std::max(x, kLogClamp));
                                                    })));
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  Graph* g = parts.front().graph;
  std::vector<double> values;
  Node n{};
  n.op = Op::kConcat;
  for (const Var& p : parts) {
    if (p.graph != g) throw ShapeError("concat: operands belong to different graphs");
    require_rank1(p.shape(), "concat");
    values.insert(values.end(), p.value().data.begin(), p.value().data.end());
    n.extra_inputs.push_back(p.id);
  }
  n.value = Tensor::vec(std::move(values));
  return OpBuilder::push(*g, std::move(n));
}

Var concat(std::initializer_list<Var> parts) { return concat(std::span<const Var>(parts.begin(), parts.size())); }

Var slice(Var a, int begin, int end) {
  require_rank1(a.shape(), "slice");
  const int size = static_cast<int>(a.value().size());
  if (begin < 0 || end > size || begin > end)
    throw ShapeError("slice: [" + std::to_string(begin) + "," + std::to_string(end) + ") outside " + a.shape().str());
  Node n = OpBuilder::unary(Op::kSlice, a, Tensor::vec(std::vector<double>(a.value().data.begin() + begin,
                                                                           a.value().data.begin() + end)));
  n.index = {begin, end};
  return OpBuilder::push(*a.graph, std::move(n));
}

Var gather(Var a, std::vector<int> indices) {
  require_rank1(a.shape(), "gather");
  const int size = static_cast<int>(a.value().size());
  std::vector<double> values(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= size)
      throw ShapeError("gather: index " + std::to_string(indices[i]) + " outside " + a.shape().str());
    values[i] = a.value().data[static_cast<std::size_t>(indices[i])];
  }
  Node n = OpBuilder::unary(Op::kGather, a, Tensor::vec(std::move(values)));
  n.index = std::move(indices);
  return OpBuilder::push(*a.graph, std::move(n));
}

Var scatter_add(Var a, std::vector<int> indices, int size) {
  require_rank1(a.shape(), "scatter_add");
  if (indices.size() != a.value().size())
    throw ShapeError("scatter_add: " + std::to_string(indices.size()) + " indices for " + a.shape().str());
  Tensor out(Shape::vec(size));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= size)
      throw ShapeError("scatter_add: index " + std::to_string(indices[i]) + " outside [0," + std::to_string(size) + ")");
    out.data[static_cast<std::size_t>(indices[i])] += a.value().data[i];
  }
  Node n = OpBuilder::unary(Op::kScatterAdd, a, std::move(out));
  n.index = std::move(indices);
  return OpBuilder::push(*a.graph, std::move(n));
}

Var sum(Var a) {
  long double s = 0.0L;
  for (double v : a.value().data) s += v;
  return OpBuilder::push(*a.graph, OpBuilder::unary(Op::kSum, a, Tensor::scalar(static_cast<double>(s))));
}

Var mean(Var a) {
  long double s = 0.0L;
  for (double v : a.value().data) s += v;
  return OpBuilder::push(*a.graph, OpBuilder::unary(Op::kMean, a, Tensor::scalar(static_cast<double>(
                                                                       s / static_cast<long double>(a.value().size())))));
}

Var min(Var a, Var b) {
  Graph& g = OpBuilder::same_graph(a, b);
  if (!(a.shape() == b.shape())) throw ShapeError("min: shapes differ " + a.shape().str() + " vs " + b.shape().str());
  return OpBuilder::push(g, OpBuilder::binary(Op::kMin, a, b, map_binary(a.value(), b.value(), Bcast::kNone, [](double x, double y) {
                                                return std::min(x, y);
                                              })));
}

Var scale(Var a, double c) {
  Node n = OpBuilder::unary(Op::kScale, a, map_unary(a.value(), [c](double x) { return x * c; }));
  n.scalar = c;
  return OpBuilder::push(*a.graph, std::move(n));
}

Var add_scalar(Var a, double c) {
  Node n = OpBuilder::unary(Op::kAddScalar, a, map_unary(a.value(), [c](double x) { return x + c; }));
  n.scalar = c;
  return OpBuilder::push(*a.graph, std::move(n));
}

Var one_minus(Var a) { return add_scalar(scale(a, -1.0), 1.0); }

Var stack(std::span<const Var> rows) {
  if (rows.empty()) throw ShapeError("stack: no rows");
  Graph* g = rows.front().graph;
  const int cols = static_cast<int>(rows.front().value().size());
  std::vector<double> values;
  values.reserve(rows.size() * static_cast<std::size_t>(cols));
  Node n{};
  n.op = Op::kStack;
  for (const Var& r : rows) {
    if (r.graph != g) throw ShapeError("stack: operands belong to different graphs");
    require_rank1(r.shape(), "stack");
    if (static_cast<int>(r.value().size()) != cols) throw ShapeError("stack: ragged rows");
    values.insert(values.end(), r.value().data.begin(), r.value().data.end());
    n.extra_inputs.push_back(r.id);
  }
  n.value = Tensor::mat(static_cast<int>(rows.size()), cols, std::move(values));
  return OpBuilder::push(*g, std::move(n));
}

Var reshape(Var a, Shape shape) {
  if (shape.size() != a.value().size())
    throw ShapeError("reshape: " + a.shape().str() + " to " + shape.str());
  return OpBuilder::push(*a.graph, OpBuilder::unary(Op::kReshape, a, Tensor(shape, a.value().data)));
}

Var pick(Var a, int index) { return reshape(gather(a, {index}), Shape::scalar()); }

void Graph::backward(Var loss, GradSet& grads, double seed) {
  if (loss.graph != this) throw ShapeError("backward: loss belongs to another graph");
  if (!is_scalar(loss.shape())) throw ShapeError("backward: loss must be scalar, got " + loss.shape().str());
  if (params_ && grads.size() != static_cast<std::size_t>(params_->size()))
    throw ShapeError("backward: gradient set does not match parameter set");

  const std::size_t count = static_cast<std::size_t>(loss.id) + 1;
  std::vector<Tensor> g(count, Tensor(Shape::scalar()));
  std::vector<char> live(count, 0);

  auto grad_of = [&](int id) -> Tensor& {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.op == Op::kParam) return grads[static_cast<std::size_t>(n.param)];
    auto i = static_cast<std::size_t>(id);
    if (!live[i]) {
      g[i] = Tensor(value(id).shape, 0.0);
      live[i] = 1;
    }
    return g[i];
  };

  grad_of(loss.id).data[0] += seed;

  for (int id = loss.id; id >= 0; --id) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.op == Op::kParam || n.op == Op::kConstant) continue;
    if (!live[static_cast<std::size_t>(id)]) continue;
    const Tensor& dy = g[static_cast<std::size_t>(id)];
    const Tensor& y = n.value;

    switch (n.op) {
      case Op::kParam:
      case Op::kConstant:
        break;
      case Op::kLookup: {
        Tensor& table = grads[static_cast<std::size_t>(n.param)];
        const int cols = table.shape.cols();
        double* row = table.data.data() + static_cast<std::ptrdiff_t>(n.index[0]) * cols;
        for (int j = 0; j < cols; ++j) row[j] += dy.data[static_cast<std::size_t>(j)];
        break;
      }
      case Op::kMatMul: {
        const Tensor& A = value(n.in[0]);
        const Tensor& B = value(n.in[1]);
        MatDims d = matmul_dims(A.shape, B.shape);
        Tensor& dA = grad_of(n.in[0]);
        for (int i = 0; i < d.m; ++i) {
          const double* dc = dy.data.data() + static_cast<std::ptrdiff_t>(i) * d.n;
          double* da = dA.data.data() + static_cast<std::ptrdiff_t>(i) * d.k;
          for (int p = 0; p < d.k; ++p) {
            const double* brow = B.data.data() + static_cast<std::ptrdiff_t>(p) * d.n;
            double s = 0.0;
            for (int j = 0; j < d.n; ++j) s += dc[j] * brow[j];
            da[p] += s;
          }
        }
        Tensor& dB = grad_of(n.in[1]);
        for (int i = 0; i < d.m; ++i) {
          const double* dc = dy.data.data() + static_cast<std::ptrdiff_t>(i) * d.n;
          const double* arow = A.data.data() + static_cast<std::ptrdiff_t>(i) * d.k;
          for (int p = 0; p < d.k; ++p) {
            const double av = arow[p];
            if (av == 0.0) continue;
            double* db = dB.data.data() + static_cast<std::ptrdiff_t>(p) * d.n;
            for (int j = 0; j < d.n; ++j) db[j] += av * dc[j];
          }
        }
        break;
      }
      case Op::kAdd:
      case Op::kSub: {
        const double sign = n.op == Op::kAdd ? 1.0 : -1.0;
        Tensor& da = grad_of(n.in[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) da.data[i] += dy.data[i];
        Tensor& db = grad_of(n.in[1]);
        const Bcast mode = bcast_of(n);
        const std::size_t cols = static_cast<std::size_t>(y.shape.cols());
        for (std::size_t i = 0; i < dy.size(); ++i) {
          std::size_t j = mode == Bcast::kNone ? i : (mode == Bcast::kScalar ? 0 : i % cols);
          db.data[j] += sign * dy.data[i];
        }
        break;
      }
      case Op::kMul: {
        const Tensor& A = value(n.in[0]);
        const Tensor& B = value(n.in[1]);
        const Bcast mode = bcast_of(n);
        Tensor& da = grad_of(n.in[0]);
        for (std::size_t i = 0; i < dy.size(); ++i)
          da.data[i] += dy.data[i] * (mode == Bcast::kNone ? B.data[i] : B.data[0]);
        Tensor& db = grad_of(n.in[1]);
        for (std::size_t i = 0; i < dy.size(); ++i) db.data[mode == Bcast::kNone ? i : 0] += dy.data[i] * A.data[i];
        break;
      }
      case Op::kDiv: {
        const Tensor& A = value(n.in[0]);
        const double s = value(n.in[1]).item();
        Tensor& da = grad_of(n.in[0]);
        double ds = 0.0;
        for (std::size_t i = 0; i < dy.size(); ++i) {
          da.data[i] += dy.data[i] / s;
          ds -= dy.data[i] * A.data[i] / (s * s);
        }
        grad_of(n.in[1]).data[0] += ds;
        break;
      }
      case Op::kSigmoid: {
        Tensor& da = grad_of(n.in[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) da.data[i] += dy.data[i] * y.data[i] * (1.0 - y.data[i]);
        break;
      }
      case Op::kTanh: {
        Tensor& da = grad_of(n.in[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) da.data[i] += dy.data[i] * (1.0 - y.data[i] * y.data[i]);
        break;
      }
      case Op::kSoftmax: {
        Tensor& da = grad_of(n.in[0]);
        const int rows = y.shape.rank == 2 ? y.shape.rows() : 1;
        const int cols = static_cast<int>(y.size()) / rows;
        for (int r = 0; r < rows; ++r) {
          const std::size_t off = static_cast<std::size_t>(r) * static_cast<std::size_t>(cols);
          double dot = 0.0;
          for (int j = 0; j < cols; ++j) dot += dy.data[off + j] * y.data[off + j];
          for (int j = 0; j < cols; ++j) da.data[off + j] += y.data[off + j] * (dy.data[off + j] - dot);
        }
        break;
      }
      case Op::kLog: {
        const Tensor& x = value(n.in[0]);
        Tensor& da = grad_of(n.in[0]);
        for (std::size_t i = 0; i < dy.size(); ++i)
          if (x.data[i] > kLogClamp) da.data[i] += dy.data[i] / x.data[i];
        break;
      }
      case Op::kConcat: {
        std::size_t off = 0;
        for (int in : n.extra_inputs) {
          Tensor& da = grad_of(in);
          for (std::size_t i = 0; i < da.size(); ++i) da.data[i] += dy.data[off + i];
          off += da.size();
        }
        break;
      }
      case Op::kStack: {
        std::size_t off = 0;
        for (int in : n.extra_inputs) {
          Tensor& da = grad_of(in);
          for (std::size_t i = 0; i < da.size(); ++i) da.data[i] += dy.data[off + i];
          off += da.size();
        }
        break;
      }
      case Op::kSlice: {
        Tensor& da = grad_of(n.in[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) da.data[static_cast<std::size_t>(n.index[0]) + i] += dy.data[i];
        break;
      }
      case Op::kGather: {
        Tensor& da = grad_of(n.in[0]);
        for (std::size_t i = 0; i < n.index.size(); ++i) da.data[static_cast<std::size_t>(n.index[i])] += dy.data[i];
        break;
      }
      case Op::kScatterAdd: {
        Tensor& da = grad_of(n.in[0]);
        for (std::size_t i = 0; i < n.index.size(); ++i) da.data[i] += dy.data[static_cast<std::size_t>(n.index[i])];
        break;
      }
      case Op::kSum:
      case Op::kMean: {
        Tensor& da = grad_of(n.in[0]);
        const double d = n.op == Op::kSum ? dy.data[0] : dy.data[0] / static_cast<double>(da.size());
        for (auto& v : da.data) v += d;
        break;
      }
      case Op::kMin: {
        const Tensor& A = value(n.in[0]);
        const Tensor& B = value(n.in[1]);
        Tensor& da = grad_of(n.in[0]);
        Tensor& db = grad_of(n.in[1]);
        for (std::size_t i = 0; i < dy.size(); ++i) {
          if (A.data[i] <= B.data[i])
            da.data[i] += dy.data[i];
          else
            db.data[i] += dy.data[i];
        }
        break;
      }
      case Op::kScale: {
        Tensor& da = grad_of(n.in[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) da.data[i] += dy.data[i] * n.scalar;
        break;
      }
      case Op::kAddScalar:
      case Op::kReshape: {
        Tensor& da = grad_of(n.in[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) da.data[i] += dy.data[i];
        break;
      }
    }
  }
}

GradSet analytic_gradients(const ParamSet& params, const LossFn& loss) {
  GradSet grads = zeros_like(params);
  Graph g(&params);
  Var l = loss(g);
  g.backward(l, grads);
  return grads;
}

GradSet numeric_gradients(ParamSet& params, const LossFn& loss, double epsilon, const ParamFilter& filter) {
  if (!(epsilon > 0)) throw ConfigError("finite-difference epsilon must be positive");
  GradSet grads = zeros_like(params);
  auto eval = [&]() {
    Graph g(&params);
    return loss(g).item();
  };
  for (int p = 0; p < params.size(); ++p) {
    if (filter && !filter(params.name(p))) continue;
    Tensor& t = params[p];
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double orig = t.data[i];
      t.data[i] = orig + epsilon;
      const double up = eval();
      t.data[i] = orig - epsilon;
      const double down = eval();
      t.data[i] = orig;
      grads[static_cast<std::size_t>(p)].data[i] = (up - down) / (2.0 * epsilon);
    }
  }
  return grads;
}

GradCheckReport compare_gradients(const ParamSet& params, const GradSet& analytic, const GradSet& numeric,
                                  double tolerance, const ParamFilter& filter) {
  GradCheckReport report;
  for (int p = 0; p < params.size(); ++p) {
    if (filter && !filter(params.name(p))) continue;
    const auto& a = analytic[static_cast<std::size_t>(p)].data;
    const auto& n = numeric[static_cast<std::size_t>(p)].data;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double err = std::abs(a[i] - n[i]) / std::max(1e-8, std::abs(a[i]) + std::abs(n[i]));
      ++report.entries_checked;
      if (report.worst_param.empty() || err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst_param = params.name(p);
        report.worst_index = i;
      }
    }
  }
  report.pass = report.max_rel_error <= tolerance;
  return report;
}

GradCheckReport finite_diff_check(ParamSet& params, const LossFn& loss, double epsilon, double tolerance,
                                  const ParamFilter& filter) {
  GradSet analytic = analytic_gradients(params, loss);
  GradSet numeric = numeric_gradients(params, loss, epsilon, filter);
  return compare_gradients(params, analytic, numeric, tolerance, filter);
}

}  // namespace unisum
