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

#ifndef UNISUM_DIFFCORE_HPP_
#define UNISUM_DIFFCORE_HPP_

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace unisum {

// Rank-0 (scalar), rank-1 or rank-2 shape. Scalars hold exactly one value.
struct Shape {
  int rank = 0;
  std::array<int, 2> dims{1, 1};

  static Shape scalar() { return {}; }
  static Shape vec(int n) { return {1, {n, 1}}; }
  static Shape mat(int rows, int cols) { return {2, {rows, cols}}; }

  std::size_t size() const {
    std::size_t s = 1;
    for (int i = 0; i < rank; ++i) s *= static_cast<std::size_t>(dims[static_cast<std::size_t>(i)]);
    return s;
  }
  int rows() const { return rank == 2 ? dims[0] : 1; }
  int cols() const { return rank == 0 ? 1 : (rank == 1 ? dims[0] : dims[1]); }
  std::string str() const;
  bool operator==(const Shape& o) const { return rank == o.rank && (rank < 1 || dims[0] == o.dims[0]) && (rank < 2 || dims[1] == o.dims[1]); }
};

struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() : data(1, 0.0) {}
  explicit Tensor(Shape s, double fill = 0.0) : shape(s), data(s.size(), fill) {}
  Tensor(Shape s, std::vector<double> values);

  static Tensor scalar(double v) { return Tensor(Shape::scalar(), v); }
  static Tensor vec(std::vector<double> values);
  static Tensor mat(int rows, int cols, std::vector<double> values);

  std::size_t size() const { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(shape.cols()) + static_cast<std::size_t>(c)]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(shape.cols()) + static_cast<std::size_t>(c)]; }
  double item() const { return data.at(0); }
  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

// Named learnable tensors in insertion order.
class ParamSet {
 public:
  int add(std::string name, Tensor init);
  int id(std::string_view name) const;
  bool contains(std::string_view name) const;
  int size() const { return static_cast<int>(tensors_.size()); }
  const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
  Tensor& operator[](int id) { return tensors_.at(static_cast<std::size_t>(id)); }
  const Tensor& operator[](int id) const { return tensors_.at(static_cast<std::size_t>(id)); }
  std::size_t num_values() const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
  std::unordered_map<std::string, int> index_;
};

// One gradient tensor per parameter, aligned with a ParamSet.
using GradSet = std::vector<Tensor>;
GradSet zeros_like(const ParamSet& params);

enum class Op {
  kParam,
  kConstant,
  kLookup,
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kSigmoid,
  kTanh,
  kSoftmax,
  kLog,
  kConcat,
  kSlice,
  kGather,
  kScatterAdd,
  kSum,
  kMean,
  kMin,
  kScale,
  kAddScalar,
  kStack,
  kReshape,
};

const char* op_name(Op op);

class Graph;

// Handle to a node of a Graph.
struct Var {
  Graph* graph = nullptr;
  int id = -1;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape; }
  double item() const { return value().item(); }
  bool valid() const { return graph != nullptr && id >= 0; }
};

// Define-by-run tape: every op is evaluated as soon as it is recorded, and
// backward() replays the tape in reverse. Parameter gradients accumulate
// directly into a caller-owned GradSet.
class Graph {
 public:
  explicit Graph(const ParamSet* params = nullptr);
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var param(int id);
  Var param(std::string_view name);
  Var constant(Tensor value);
  Var scalar(double v) { return constant(Tensor::scalar(v)); }
  // Row `row` of a rank-2 parameter, without materializing the whole table.
  Var lookup(int param_id, int row);

  const Tensor& value(int node) const;
  std::size_t num_nodes() const { return nodes_.size(); }
  const ParamSet* params() const { return params_; }

  // Reverse-mode accumulation from a scalar node. Gradients of parameters
  // reachable from `loss` are added into `grads` (scaled by `seed`).
  void backward(Var loss, GradSet& grads, double seed = 1.0);

 private:
  friend struct OpBuilder;

  struct Node {
    Op op;
    std::array<int, 2> in{-1, -1};
    std::vector<int> extra_inputs;  // concat / stack
    std::vector<int> index;         // gather / scatter / slice bounds / lookup
    double scalar = 0.0;
    int param = -1;
    Tensor value;
  };

  Var push(Node node);
  void check_finite(const Node& node, std::size_t id) const;

  const ParamSet* params_;
  std::vector<Node> nodes_;
  std::unordered_map<int, int> param_nodes_;
};

// Graph operators. All shape checks happen here and throw ShapeError.
Var matmul(Var a, Var b);  // [m,k]x[k,n], [k]x[k,n] or [m,k]x[k]
Var add(Var a, Var b);     // same shape, [m,n]+[n] or anything + scalar
Var sub(Var a, Var b);     // same shape or anything - scalar
Var mul(Var a, Var b);     // same shape or anything * scalar
Var div(Var a, Var s);     // s scalar
Var sigmoid(Var a);
Var tanh(Var a);
Var softmax(Var a);  // along the last dimension, max-subtracted
Var log(Var a);      // log(max(a, 1e-12))
Var concat(std::span<const Var> parts);
Var concat(std::initializer_list<Var> parts);
Var slice(Var a, int begin, int end);                          // rank-1
Var gather(Var a, std::vector<int> indices);                   // rank-1 -> [k]
Var scatter_add(Var a, std::vector<int> indices, int size);    // rank-1 -> [size]
Var sum(Var a);
Var mean(Var a);
Var min(Var a, Var b);  // elementwise; ties route the gradient to a
Var scale(Var a, double c);
Var add_scalar(Var a, double c);
Var one_minus(Var a);
Var stack(std::span<const Var> rows);  // rank-1 rows -> rank-2
Var reshape(Var a, Shape shape);
Var pick(Var a, int index);  // scalar a[index]

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }

inline constexpr double kLogClamp = 1e-12;

// Finite-difference gradient checking.
using LossFn = std::function<Var(Graph&)>;
using ParamFilter = std::function<bool(const std::string&)>;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  std::size_t entries_checked = 0;
  bool pass = true;
};

GradSet analytic_gradients(const ParamSet& params, const LossFn& loss);
// Central differences for every entry of the parameters accepted by `filter`
// (all parameters when empty); other entries are left at zero.
GradSet numeric_gradients(ParamSet& params, const LossFn& loss, double epsilon, const ParamFilter& filter = {});
// Relative error |a-n| / max(1e-8, |a|+|n|) per entry; pass iff max <= tolerance.
GradCheckReport compare_gradients(const ParamSet& params, const GradSet& analytic, const GradSet& numeric,
                                  double tolerance, const ParamFilter& filter = {});
GradCheckReport finite_diff_check(ParamSet& params, const LossFn& loss, double epsilon, double tolerance,
                                  const ParamFilter& filter = {});

}  // namespace unisum

#endif  // UNISUM_DIFFCORE_HPP_
