#include "cmipdual/model.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cmipdual {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

bool same(const Matrix& a, const Matrix& b)
{
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col = 1;
    const auto end = std::min(byte > 0 ? byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

Rational exact_or_throw(double v, const std::string& where)
{
    auto r = Rational::from_double(v);
    if (!r) {
        throw ModelError(where + ": value " + std::to_string(v) + " has no exact 64-bit rational form");
    }
    return *r;
}

// Which block owns each row.
std::vector<std::size_t> row_blocks(const ConeProduct& K)
{
    std::vector<std::size_t> out(K.total_dim());
    for (std::size_t i = 0; i < K.size(); ++i) {
        for (std::size_t r = 0; r < K.blocks()[i].ambient_dim(); ++r) {
            out[K.offset(i) + r] = i;
        }
    }
    return out;
}

// Appends one block of rows to `data`.
void append_block(InstanceData& data, const ConeBlock& blk, const Matrix& A, const Matrix& G, const Vector& b,
                  bool rational, const std::vector<std::optional<ExactRow>>& exact)
{
    const auto m0 = data.A.rows();
    const auto k = A.rows();
    data.A.conservativeResize(m0 + k, Eigen::NoChange);
    data.G.conservativeResize(m0 + k, Eigen::NoChange);
    data.b.conservativeResize(m0 + k);
    data.A.bottomRows(k) = A;
    data.G.bottomRows(k) = G;
    data.b.tail(k) = b;
    auto blocks = data.K.blocks();
    blocks.push_back(blk);
    data.K = ConeProduct(std::move(blocks));
    data.rational_block.push_back(rational);
    for (Eigen::Index r = 0; r < k; ++r) {
        data.exact.push_back(rational && !exact.empty() ? exact[static_cast<std::size_t>(r)] : std::optional<ExactRow>{});
    }
}

InstanceData empty_like(const Instance& inst)
{
    InstanceData d;
    d.A = Matrix(0, static_cast<Eigen::Index>(inst.n1()));
    d.G = Matrix(0, static_cast<Eigen::Index>(inst.n2()));
    d.b = Vector(0);
    d.c = inst.c();
    d.d = inst.d();
    d.binary = inst.binary_mask();
    d.int_names = inst.int_names();
    d.cont_names = inst.cont_names();
    return d;
}

void append_parent_block(InstanceData& data, const Instance& inst, std::size_t i)
{
    const auto& blk = inst.cone().blocks()[i];
    const auto off = static_cast<Eigen::Index>(inst.cone().offset(i));
    const auto len = static_cast<Eigen::Index>(blk.ambient_dim());
    std::vector<std::optional<ExactRow>> exact;
    for (Eigen::Index r = 0; r < len; ++r) {
        exact.push_back(inst.exact_row(static_cast<std::size_t>(off + r)));
    }
    append_block(data, blk, inst.A().middleRows(off, len), inst.G().middleRows(off, len), inst.b().segment(off, len),
                 inst.is_rational_block(i), exact);
}

double number_value(const json& v, const std::string& where)
{
    if (v.is_number()) {
        return v.get<double>();
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
        const auto den = v[1].get<std::int64_t>();
        if (den == 0) {
            throw ModelError(where + ": zero denominator");
        }
        return static_cast<double>(v[0].get<std::int64_t>()) / static_cast<double>(den);
    }
    throw ModelError(where + ": expected a number or [num, den]");
}

Rational exact_value(const json& v, const std::string& where)
{
    if (v.is_number_integer()) {
        return Rational(v.get<std::int64_t>());
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
        const auto den = v[1].get<std::int64_t>();
        if (den == 0) {
            throw ModelError(where + ": zero denominator");
        }
        return Rational(v[0].get<std::int64_t>(), den);
    }
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (x == std::floor(x)) {
            return exact_or_throw(x, where);
        }
    }
    throw ModelError(where + ": rational blocks take integers or [num, den] pairs");
}

ojson exact_json(const Rational& r)
{
    if (r.is_integer()) {
        return r.num();
    }
    return ojson::array({r.num(), r.den()});
}

Instance parse_json(const json& doc)
{
    if (!doc.is_object()) {
        throw ModelError("instance: top level must be an object");
    }
    for (const char* key : {"vars", "cones", "rows"}) {
        if (!doc.contains(key) || !doc[key].is_array()) {
            throw ModelError(std::string("instance: missing array '") + key + "'");
        }
    }

    struct VarInfo {
        bool integer;
        std::size_t index;
    };
    std::map<std::string, VarInfo> lookup;
    std::vector<std::string> int_names;
    std::vector<std::string> cont_names;
    std::vector<double> c;
    std::vector<double> d;
    std::vector<bool> binary;
    for (std::size_t j = 0; j < doc["vars"].size(); ++j) {
        const auto& v = doc["vars"][j];
        const std::string where = "vars[" + std::to_string(j) + "]";
        if (!v.is_object() || !v.contains("name") || !v["name"].is_string()) {
            throw ModelError(where + ": needs a string 'name'");
        }
        const auto name = v["name"].get<std::string>();
        const auto type = v.value("type", std::string("cont"));
        const double obj = v.contains("objective") ? number_value(v["objective"], where + ".objective") : 0.0;
        if (lookup.count(name)) {
            throw ModelError(where + ": duplicate variable '" + name + "'");
        }
        if (type == "int" || type == "integer" || type == "bin" || type == "binary") {
            lookup[name] = {true, int_names.size()};
            int_names.push_back(name);
            c.push_back(obj);
            binary.push_back(type == "bin" || type == "binary");
        } else if (type == "cont" || type == "continuous") {
            lookup[name] = {false, cont_names.size()};
            cont_names.push_back(name);
            d.push_back(obj);
        } else {
            throw ModelError(where + ": unknown type '" + type + "'");
        }
    }

    std::vector<ConeBlock> blocks;
    std::vector<bool> rational;
    for (std::size_t i = 0; i < doc["cones"].size(); ++i) {
        const auto& k = doc["cones"][i];
        const std::string where = "cones[" + std::to_string(i) + "]";
        if (!k.is_object() || !k.contains("kind") || !k.contains("dim") || !k["dim"].is_number_integer()) {
            throw ModelError(where + ": needs 'kind' and integer 'dim'");
        }
        const auto kind = k["kind"].get<std::string>();
        const auto dim = k["dim"].get<std::int64_t>();
        if (dim < 1) {
            throw ModelError(where + ": dim must be positive");
        }
        const auto n = static_cast<std::size_t>(dim);
        try {
            if (kind == "orthant") {
                blocks.push_back(ConeBlock::orthant(n));
            } else if (kind == "soc") {
                blocks.push_back(ConeBlock::second_order(n));
            } else if (kind == "psd") {
                blocks.push_back(ConeBlock::psd(n));
            } else {
                throw ModelError(where + ": unknown cone kind '" + kind + "'");
            }
        } catch (const ModelError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ModelError(where + ": " + e.what());
        }
        const bool rat = k.value("rational", false);
        if (rat && kind != "orthant") {
            throw ModelError(where + ": only orthant blocks can be rational");
        }
        rational.push_back(rat);
    }

    InstanceData data;
    data.K = ConeProduct(blocks);
    const auto m = static_cast<Eigen::Index>(data.K.total_dim());
    const auto& rows = doc["rows"];
    if (static_cast<Eigen::Index>(rows.size()) != m) {
        throw ModelError("rows: cones need " + std::to_string(m) + " rows, got " + std::to_string(rows.size()));
    }
    const auto n1 = static_cast<Eigen::Index>(int_names.size());
    const auto n2 = static_cast<Eigen::Index>(cont_names.size());
    data.A = Matrix::Zero(m, n1);
    data.G = Matrix::Zero(m, n2);
    data.b = Vector::Zero(m);
    data.exact.assign(static_cast<std::size_t>(m), std::nullopt);
    const auto owner = row_blocks(data.K);
    for (Eigen::Index r = 0; r < m; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        const std::string where = "rows[" + std::to_string(r) + "]";
        if (!row.is_object()) {
            throw ModelError(where + ": must be an object");
        }
        const bool rat = rational[owner[static_cast<std::size_t>(r)]];
        ExactRow ex{std::vector<Rational>(static_cast<std::size_t>(n1 + n2)), Rational(0)};
        if (row.contains("coeffs")) {
            if (!row["coeffs"].is_object()) {
                throw ModelError(where + ".coeffs: must be an object");
            }
            for (const auto& [name, val] : row["coeffs"].items()) {
                const auto it = lookup.find(name);
                if (it == lookup.end()) {
                    throw ModelError(where + ".coeffs: unknown variable '" + name + "'");
                }
                const auto col = static_cast<Eigen::Index>(it->second.index);
                const auto w = where + ".coeffs." + name;
                if (rat) {
                    const auto q = exact_value(val, w);
                    ex.coeffs[static_cast<std::size_t>(it->second.integer ? col : n1 + col)] = q;
                    (it->second.integer ? data.A(r, col) : data.G(r, col)) = q.to_double();
                } else {
                    (it->second.integer ? data.A(r, col) : data.G(r, col)) = number_value(val, w);
                }
            }
        }
        if (row.contains("rhs")) {
            if (rat) {
                ex.rhs = exact_value(row["rhs"], where + ".rhs");
                data.b[r] = ex.rhs.to_double();
            } else {
                data.b[r] = number_value(row["rhs"], where + ".rhs");
            }
        }
        if (rat) {
            data.exact[static_cast<std::size_t>(r)] = ex;
        }
    }
    data.c = Eigen::Map<const Vector>(c.data(), n1);
    data.d = Eigen::Map<const Vector>(d.data(), n2);
    data.binary = binary;
    data.rational_block = rational;
    data.int_names = int_names;
    data.cont_names = cont_names;
    return Instance(std::move(data));
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column)
{
}

Instance::Instance(InstanceData data) : data_(std::move(data))
{
    const auto m = static_cast<Eigen::Index>(data_.K.total_dim());
    const auto n1 = data_.A.cols();
    const auto n2 = data_.G.cols();
    if (data_.A.rows() != m || data_.G.rows() != m || data_.b.size() != m) {
        throw ModelError("instance: A, G and b need " + std::to_string(m) + " rows to match the cone");
    }
    if (data_.c.size() != n1 || data_.d.size() != n2) {
        throw ModelError("instance: objective length does not match the variable count");
    }
    if (!data_.A.allFinite() || !data_.G.allFinite() || !data_.b.allFinite() || !data_.c.allFinite() ||
        !data_.d.allFinite()) {
        throw ModelError("instance: data must be finite");
    }
    if (data_.binary.empty()) {
        data_.binary.assign(static_cast<std::size_t>(n1), false);
    }
    if (data_.binary.size() != static_cast<std::size_t>(n1)) {
        throw ModelError("instance: binary mask length differs from n1");
    }
    if (data_.rational_block.empty()) {
        data_.rational_block.assign(data_.K.size(), false);
    }
    if (data_.rational_block.size() != data_.K.size()) {
        throw ModelError("instance: rational tags differ from the block count");
    }
    for (std::size_t i = 0; i < data_.K.size(); ++i) {
        if (data_.rational_block[i] && data_.K.blocks()[i].kind() != ConeKind::Orthant) {
            throw ModelError("instance: only orthant blocks can be rational");
        }
    }
    if (data_.exact.empty()) {
        data_.exact.assign(static_cast<std::size_t>(m), std::nullopt);
    }
    if (data_.exact.size() != static_cast<std::size_t>(m)) {
        throw ModelError("instance: exact row table has the wrong length");
    }
    const auto owner = row_blocks(data_.K);
    for (Eigen::Index r = 0; r < m; ++r) {
        auto& ex = data_.exact[static_cast<std::size_t>(r)];
        if (!data_.rational_block[owner[static_cast<std::size_t>(r)]]) {
            ex.reset();
            continue;
        }
        const std::string where = "row " + std::to_string(r);
        if (!ex) {
            ExactRow row{{}, exact_or_throw(data_.b[r], where)};
            for (Eigen::Index j = 0; j < n1; ++j) {
                row.coeffs.push_back(exact_or_throw(data_.A(r, j), where));
            }
            for (Eigen::Index j = 0; j < n2; ++j) {
                row.coeffs.push_back(exact_or_throw(data_.G(r, j), where));
            }
            ex = std::move(row);
        }
        if (ex->coeffs.size() != static_cast<std::size_t>(n1 + n2)) {
            throw ModelError(where + ": exact row has the wrong length");
        }
        for (Eigen::Index j = 0; j < n1; ++j) {
            data_.A(r, j) = ex->coeffs[static_cast<std::size_t>(j)].to_double();
        }
        for (Eigen::Index j = 0; j < n2; ++j) {
            data_.G(r, j) = ex->coeffs[static_cast<std::size_t>(n1 + j)].to_double();
        }
        data_.b[r] = ex->rhs.to_double();
    }
    if (data_.int_names.empty()) {
        for (Eigen::Index j = 0; j < n1; ++j) {
            data_.int_names.push_back("x" + std::to_string(j + 1));
        }
    }
    if (data_.cont_names.empty()) {
        for (Eigen::Index j = 0; j < n2; ++j) {
            data_.cont_names.push_back("y" + std::to_string(j + 1));
        }
    }
    if (data_.int_names.size() != static_cast<std::size_t>(n1) ||
        data_.cont_names.size() != static_cast<std::size_t>(n2)) {
        throw ModelError("instance: name lists do not match the variable counts");
    }
    std::set<std::string> seen;
    for (const auto* names : {&data_.int_names, &data_.cont_names}) {
        for (const auto& nm : *names) {
            if (!seen.insert(nm).second) {
                throw ModelError("instance: duplicate variable name '" + nm + "'");
            }
        }
    }
}

bool Instance::any_binary() const noexcept
{
    return std::find(data_.binary.begin(), data_.binary.end(), true) != data_.binary.end();
}

bool Instance::all_binary() const noexcept
{
    return std::find(data_.binary.begin(), data_.binary.end(), false) == data_.binary.end();
}

Matrix Instance::full_matrix() const
{
    Matrix out(static_cast<Eigen::Index>(m()), static_cast<Eigen::Index>(n1() + n2()));
    out << data_.A, data_.G;
    return out;
}

Vector Instance::full_objective() const
{
    Vector out(static_cast<Eigen::Index>(n1() + n2()));
    out << data_.c, data_.d;
    return out;
}

bool Instance::operator==(const Instance& o) const
{
    const auto& a = data_;
    const auto& b = o.data_;
    return same(a.A, b.A) && same(a.G, b.G) && same(a.b, b.b) && same(a.c, b.c) && same(a.d, b.d) && a.K == b.K &&
           a.binary == b.binary && a.rational_block == b.rational_block && a.exact == b.exact &&
           a.int_names == b.int_names && a.cont_names == b.cont_names;
}

Instance make_instance(Matrix A, Matrix G, Vector b, Vector c, Vector d, ConeProduct K, std::vector<bool> binary,
                       std::vector<bool> rational_block)
{
    InstanceData data;
    data.A = std::move(A);
    data.G = std::move(G);
    data.b = std::move(b);
    data.c = std::move(c);
    data.d = std::move(d);
    data.K = std::move(K);
    data.binary = std::move(binary);
    data.rational_block = std::move(rational_block);
    return Instance(std::move(data));
}

Instance parse_instance(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte);
        std::string msg = e.what();
        if (const auto pos = msg.find("syntax error"); pos != std::string::npos) {
            msg = msg.substr(pos);
        }
        throw ParseError(msg, line, col);
    }
    try {
        return parse_json(doc);
    } catch (const json::exception& e) {
        throw ModelError(std::string("instance: ") + e.what());
    }
}

Instance parse_instance(std::istream& in)
{
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

Instance load_instance(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return parse_instance(in);
}

std::string serialize_instance(const Instance& inst)
{
    ojson doc;
    doc["vars"] = ojson::array();
    for (std::size_t j = 0; j < inst.n1(); ++j) {
        doc["vars"].push_back({{"name", inst.int_names()[j]},
                               {"type", inst.is_binary(j) ? "bin" : "int"},
                               {"objective", inst.c()[static_cast<Eigen::Index>(j)] + 0.0}});
    }
    for (std::size_t j = 0; j < inst.n2(); ++j) {
        doc["vars"].push_back({{"name", inst.cont_names()[j]},
                               {"type", "cont"},
                               {"objective", inst.d()[static_cast<Eigen::Index>(j)] + 0.0}});
    }
    doc["cones"] = ojson::array();
    for (std::size_t i = 0; i < inst.cone().size(); ++i) {
        const auto& blk = inst.cone().blocks()[i];
        const char* kind = blk.kind() == ConeKind::Orthant ? "orthant"
                           : blk.kind() == ConeKind::SecondOrder ? "soc"
                                                                 : "psd";
        doc["cones"].push_back({{"kind", kind}, {"dim", blk.param()}, {"rational", inst.is_rational_block(i)}});
    }
    doc["rows"] = ojson::array();
    const auto n1 = static_cast<Eigen::Index>(inst.n1());
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(inst.m()); ++r) {
        ojson coeffs = ojson::object();
        ojson row;
        const auto& ex = inst.exact_row(static_cast<std::size_t>(r));
        for (Eigen::Index j = 0; j < n1 + static_cast<Eigen::Index>(inst.n2()); ++j) {
            const double v = j < n1 ? inst.A()(r, j) : inst.G()(r, j - n1);
            if (v == 0.0) {
                continue;
            }
            const auto& name = j < n1 ? inst.int_names()[static_cast<std::size_t>(j)]
                                      : inst.cont_names()[static_cast<std::size_t>(j - n1)];
            coeffs[name] = ex ? exact_json(ex->coeffs[static_cast<std::size_t>(j)]) : ojson(v);
        }
        row["coeffs"] = coeffs;
        row["rhs"] = ex ? exact_json(ex->rhs) : ojson(inst.b()[r] + 0.0);
        doc["rows"].push_back(row);
    }
    return doc.dump(2) + "\n";
}

Instance continuous_relaxation(const Instance& inst)
{
    const auto n1 = static_cast<Eigen::Index>(inst.n1());
    const auto n2 = static_cast<Eigen::Index>(inst.n2());
    InstanceData data;
    data.A = Matrix(0, 0);
    data.G = Matrix(0, n1 + n2);
    data.b = Vector(0);
    data.c = Vector(0);
    data.d = inst.full_objective();
    data.cont_names = inst.int_names();
    data.cont_names.insert(data.cont_names.end(), inst.cont_names().begin(), inst.cont_names().end());
    for (std::size_t i = 0; i < inst.cone().size(); ++i) {
        const auto& blk = inst.cone().blocks()[i];
        const auto off = static_cast<Eigen::Index>(inst.cone().offset(i));
        const auto len = static_cast<Eigen::Index>(blk.ambient_dim());
        std::vector<std::optional<ExactRow>> exact;
        for (Eigen::Index r = 0; r < len; ++r) {
            exact.push_back(inst.exact_row(static_cast<std::size_t>(off + r)));
        }
        Matrix rows(len, n1 + n2);
        rows << inst.A().middleRows(off, len), inst.G().middleRows(off, len);
        append_block(data, blk, Matrix(len, 0), rows, inst.b().segment(off, len), inst.is_rational_block(i), exact);
    }
    std::vector<Eigen::Index> bins;
    for (Eigen::Index j = 0; j < n1; ++j) {
        if (inst.is_binary(static_cast<std::size_t>(j))) {
            bins.push_back(j);
        }
    }
    if (!bins.empty()) {
        const auto k = static_cast<Eigen::Index>(2 * bins.size());
        Matrix rows = Matrix::Zero(k, n1 + n2);
        Vector rhs = Vector::Zero(k);
        for (std::size_t t = 0; t < bins.size(); ++t) {
            const auto r = static_cast<Eigen::Index>(2 * t);
            rows(r, bins[t]) = 1.0;
            rows(r + 1, bins[t]) = -1.0;
            rhs[r + 1] = -1.0;
        }
        append_block(data, ConeBlock::orthant(static_cast<std::size_t>(k)), Matrix(k, 0), rows, rhs, true, {});
    }
    return Instance(std::move(data));
}

Instance perturb_rhs(const Instance& inst, const Vector& h)
{
    if (static_cast<std::size_t>(h.size()) != inst.m()) {
        throw ModelError("perturb_rhs: right-hand side has length " + std::to_string(h.size()) + ", expected " +
                         std::to_string(inst.m()));
    }
    InstanceData data = inst.data();
    data.b = h;
    for (std::size_t i = 0; i < inst.cone().size(); ++i) {
        if (!data.rational_block[i]) {
            continue;
        }
        const auto off = inst.cone().offset(i);
        const auto len = inst.cone().blocks()[i].ambient_dim();
        bool ok = true;
        for (std::size_t r = off; r < off + len && ok; ++r) {
            const auto q = Rational::from_double(h[static_cast<Eigen::Index>(r)]);
            if (q) {
                data.exact[r]->rhs = *q;
            } else {
                ok = false;
            }
        }
        if (!ok) {
            data.rational_block[i] = false;
            for (std::size_t r = off; r < off + len; ++r) {
                data.exact[r].reset();
            }
        }
    }
    return Instance(std::move(data));
}

Instance select_blocks(const Instance& inst, const std::vector<std::size_t>& blocks)
{
    InstanceData data = empty_like(inst);
    for (const auto i : blocks) {
        if (i >= inst.cone().size()) {
            throw ModelError("select_blocks: block index out of range");
        }
        append_parent_block(data, inst, i);
    }
    return Instance(std::move(data));
}

TwoBlockView::TwoBlockView(Instance parent, std::vector<BlockPart> partition)
    : parent_(std::move(parent)), partition_(std::move(partition))
{
    if (partition_.size() != parent_.cone().size()) {
        throw ModelError("split_blocks: assignment has " + std::to_string(partition_.size()) +
                         " entries for " + std::to_string(parent_.cone().size()) + " blocks");
    }
}

std::optional<Instance> TwoBlockView::part(BlockPart which) const
{
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < partition_.size(); ++i) {
        if (partition_[i] == which) {
            chosen.push_back(i);
        }
    }
    if (chosen.empty()) {
        return std::nullopt;
    }
    return select_blocks(parent_, chosen);
}

std::vector<std::size_t> TwoBlockView::rows(BlockPart which) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < partition_.size(); ++i) {
        if (partition_[i] != which) {
            continue;
        }
        const auto off = parent_.cone().offset(i);
        for (std::size_t r = 0; r < parent_.cone().blocks()[i].ambient_dim(); ++r) {
            out.push_back(off + r);
        }
    }
    return out;
}

bool TwoBlockView::empty(BlockPart which) const
{
    return std::find(partition_.begin(), partition_.end(), which) == partition_.end();
}

Instance TwoBlockView::reassemble() const
{
    const auto p1 = part(BlockPart::S1);
    const auto p2 = part(BlockPart::S2);
    InstanceData data = empty_like(parent_);
    std::size_t k1 = 0;
    std::size_t k2 = 0;
    for (const auto which : partition_) {
        if (which == BlockPart::S1) {
            append_parent_block(data, *p1, k1++);
        } else {
            append_parent_block(data, *p2, k2++);
        }
    }
    return Instance(std::move(data));
}

TwoBlockView split_blocks(const Instance& inst, const std::vector<BlockPart>& assignment)
{
    return TwoBlockView(inst, assignment);
}

Instance materialize_binary_bounds(const Instance& inst)
{
    const auto n1 = static_cast<Eigen::Index>(inst.n1());
    const auto n2 = static_cast<Eigen::Index>(inst.n2());
    std::vector<Eigen::Index> bins;
    for (Eigen::Index j = 0; j < n1; ++j) {
        if (inst.is_binary(static_cast<std::size_t>(j))) {
            bins.push_back(j);
        }
    }
    if (bins.empty()) {
        return inst;
    }
    InstanceData data = inst.data();
    const auto k = static_cast<Eigen::Index>(2 * bins.size());
    Matrix rows = Matrix::Zero(k, n1);
    Vector rhs = Vector::Zero(k);
    for (std::size_t t = 0; t < bins.size(); ++t) {
        const auto r = static_cast<Eigen::Index>(2 * t);
        rows(r, bins[t]) = 1.0;
        rows(r + 1, bins[t]) = -1.0;
        rhs[r + 1] = -1.0;
    }
    append_block(data, ConeBlock::orthant(static_cast<std::size_t>(k)), rows, Matrix::Zero(k, n2), rhs, true, {});
    return Instance(std::move(data));
}

}  // namespace cmipdual
