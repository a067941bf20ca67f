#include "bcfr/regret.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "bcfr/error.hpp"

namespace bcfr {

DenseTable::DenseTable(std::shared_ptr< const TableLayout > layout, int num_types)
    : layout_(std::move(layout)), num_types_(num_types)
{
   if(! layout_ || num_types < 1) {
      throw ValidationError("table: needs a layout and at least one type");
   }
   values_.assign(layout_->total * static_cast< std::size_t >(num_types), 0.0);
}

std::size_t DenseTable::offset(TypeId type, int infoset) const
{
   if(type.index < 0 || type.index >= num_types_) {
      throw ValidationError("table: type index out of range");
   }
   return static_cast< std::size_t >(type.index) * layout_->total + layout_->offset[static_cast< std::size_t >(infoset)];
}

std::span< const double > DenseTable::at(TypeId type, int infoset) const
{
   return {values_.data() + offset(type, infoset), layout_->num_actions[static_cast< std::size_t >(infoset)]};
}

std::span< double > DenseTable::slot(TypeId type, int infoset)
{
   return {values_.data() + offset(type, infoset), layout_->num_actions[static_cast< std::size_t >(infoset)]};
}

void DenseTable::clear()
{
   std::fill(values_.begin(), values_.end(), 0.0);
}

// ---------------------------------------------------------------------------

RegretTable::RegretTable(std::shared_ptr< const TableLayout > layout, int num_types, RegretMode mode)
    : DenseTable(std::move(layout), num_types), mode_(mode)
{
}

void RegretTable::accumulate_vanilla(TypeId type, int infoset, std::span< const double > increments, double weight)
{
   if(mode_ != RegretMode::vanilla) {
      throw ModeMismatchError("accumulate_vanilla on a plus-mode regret table");
   }
   auto entry = slot(type, infoset);
   if(increments.size() != entry.size()) {
      throw ValidationError("accumulate_vanilla: increment length does not match the action count");
   }
   for(std::size_t a = 0; a < entry.size(); ++a) {
      entry[a] += weight * increments[a];
   }
}

void RegretTable::accumulate_plus(TypeId type, int infoset, std::span< const double > increments, double weight)
{
   if(mode_ != RegretMode::plus) {
      throw ModeMismatchError("accumulate_plus on a vanilla regret table");
   }
   auto entry = slot(type, infoset);
   if(increments.size() != entry.size()) {
      throw ValidationError("accumulate_plus: increment length does not match the action count");
   }
   for(std::size_t a = 0; a < entry.size(); ++a) {
      entry[a] = std::max(entry[a] + weight * increments[a], 0.0);
   }
}

void RegretTable::accumulate(TypeId type, int infoset, std::span< const double > increments, double weight)
{
   if(mode_ == RegretMode::plus) {
      accumulate_plus(type, infoset, increments, weight);
   }
   else {
      accumulate_vanilla(type, infoset, increments, weight);
   }
}

void RegretTable::merge(std::span< const RegretTable* const > deltas)
{
   auto& v = values();
   std::vector< double > sum(v.size(), 0.0);
   for(const RegretTable* d : deltas) {
      if(d->mode() != RegretMode::vanilla || d->raw().size() != v.size()) {
         throw ValidationError("RegretTable::merge: deltas must be vanilla tables of the same shape");
      }
      const auto dv = d->raw();
      for(std::size_t k = 0; k < v.size(); ++k) {
         sum[k] += dv[k];
      }
   }
   for(std::size_t k = 0; k < v.size(); ++k) {
      v[k] += sum[k];
      if(mode_ == RegretMode::plus) {
         v[k] = std::max(v[k], 0.0);
      }
   }
}

void RegretTable::assign(std::span< const double > src)
{
   auto& v = values();
   if(src.size() != v.size()) {
      throw ValidationError("RegretTable::assign: size mismatch");
   }
   if(mode_ == RegretMode::plus && std::any_of(src.begin(), src.end(), [](double x) { return x < 0.0; })) {
      throw ValidationError("RegretTable::assign: negative entry in a plus-mode table");
   }
   std::copy(src.begin(), src.end(), v.begin());
}

void regret_match(std::span< const double > regrets, std::span< double > out)
{
   double positive = 0.0;
   for(double r : regrets) {
      if(r > 0.0) {
         positive += r;
      }
   }
   if(positive > 0.0) {
      for(std::size_t a = 0; a < regrets.size(); ++a) {
         out[a] = regrets[a] > 0.0 ? regrets[a] / positive : 0.0;
      }
   }
   else {
      const double u = 1.0 / static_cast< double >(regrets.size());
      std::fill(out.begin(), out.begin() + static_cast< long >(regrets.size()), u);
   }
}

std::vector< double > regret_match(const RegretTable& table, TypeId type, int infoset)
{
   const auto r = table.at(type, infoset);
   std::vector< double > out(r.size());
   regret_match(r, out);
   return out;
}

// ---------------------------------------------------------------------------

StrategyTable::StrategyTable(std::shared_ptr< const TableLayout > layout, int num_types, AveragingScheme scheme)
    : DenseTable(std::move(layout), num_types), scheme_(scheme)
{
}

void StrategyTable::add_strategy_weight(TypeId type, int infoset, std::span< const double > sigma, double reach, int iteration)
{
   auto entry = slot(type, infoset);
   if(sigma.size() != entry.size()) {
      throw ValidationError("add_strategy_weight: strategy length does not match the action count");
   }
   const double w = scheme_ == AveragingScheme::linear ? static_cast< double >(iteration) * reach : reach;
   for(std::size_t a = 0; a < entry.size(); ++a) {
      entry[a] += w * sigma[a];
   }
}

void StrategyTable::merge(std::span< const StrategyTable* const > deltas)
{
   auto& v = values();
   for(const StrategyTable* d : deltas) {
      if(d->raw().size() != v.size()) {
         throw ValidationError("StrategyTable::merge: shape mismatch");
      }
      const auto dv = d->raw();
      for(std::size_t k = 0; k < v.size(); ++k) {
         v[k] += dv[k];
      }
   }
}

void StrategyTable::assign(std::span< const double > src)
{
   auto& v = values();
   if(src.size() != v.size()) {
      throw ValidationError("StrategyTable::assign: size mismatch");
   }
   std::copy(src.begin(), src.end(), v.begin());
}

void average_strategy(std::span< const double > sums, std::span< double > out)
{
   double total = 0.0;
   for(double s : sums) {
      total += s;
   }
   if(total > 0.0) {
      for(std::size_t a = 0; a < sums.size(); ++a) {
         out[a] = sums[a] / total;
      }
   }
   else {
      const double u = 1.0 / static_cast< double >(sums.size());
      std::fill(out.begin(), out.begin() + static_cast< long >(sums.size()), u);
   }
}

std::vector< double > average_strategy(const StrategyTable& table, TypeId type, int infoset)
{
   const auto s = table.at(type, infoset);
   std::vector< double > out(s.size());
   average_strategy(s, out);
   return out;
}

StrategyProfile average_profile(const GameSpec& spec, const StrategyTable& table)
{
   StrategyProfile out(spec, table.num_types());
   for(int t = 0; t < table.num_types(); ++t) {
      for(std::size_t i = 0; i < spec.num_infosets(); ++i) {
         average_strategy(table.at(TypeId{t}, static_cast< int >(i)), out.mutable_at(TypeId{t}, static_cast< int >(i)));
      }
   }
   return out;
}

StrategyProfile current_profile(const GameSpec& spec, const RegretTable& table)
{
   StrategyProfile out(spec, table.num_types());
   for(int t = 0; t < table.num_types(); ++t) {
      for(std::size_t i = 0; i < spec.num_infosets(); ++i) {
         regret_match(table.at(TypeId{t}, static_cast< int >(i)), out.mutable_at(TypeId{t}, static_cast< int >(i)));
      }
   }
   return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'B', 'C', 'F', 'R', 'T', 'B', 'L', '\0'};
constexpr std::uint32_t kRegretKind = 1;
constexpr std::uint32_t kStrategyKind = 2;

template < typename T >
T to_little(T v)
{
   if constexpr(std::endian::native == std::endian::big) {
      auto bytes = std::bit_cast< std::array< unsigned char, sizeof(T) > >(v);
      std::reverse(bytes.begin(), bytes.end());
      return std::bit_cast< T >(bytes);
   }
   return v;
}

void write_header(std::ostream& out, const GameSpec& spec, std::uint32_t kind, std::uint32_t mode, const DenseTable& t)
{
   out.write(kMagic, sizeof(kMagic));
   write_u32(out, kCheckpointVersion);
   write_u32(out, kind);
   write_u32(out, mode);
   write_u64(out, spec.structure_hash());
   write_u32(out, static_cast< std::uint32_t >(t.num_types()));
   write_u64(out, spec.num_infosets());
   write_u64(out, t.raw().size());
   for(double v : t.raw()) {
      write_f64(out, v);
   }
   if(! out) {
      throw CheckpointError("checkpoint: write failed");
   }
}

struct Header {
   std::uint32_t mode = 0;
   int num_types = 0;
   std::vector< double > values;
};

Header read_header(std::istream& in, const GameSpec& spec, std::uint32_t kind)
{
   char magic[8] = {};
   in.read(magic, sizeof(magic));
   if(! in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
      throw CheckpointError("checkpoint: bad magic");
   }
   if(read_u32(in) != kCheckpointVersion) {
      throw CheckpointError("checkpoint: unsupported version");
   }
   if(read_u32(in) != kind) {
      throw CheckpointError("checkpoint: wrong table kind");
   }
   Header h;
   h.mode = read_u32(in);
   if(read_u64(in) != spec.structure_hash()) {
      throw CheckpointError("checkpoint: game hash does not match");
   }
   h.num_types = static_cast< int >(read_u32(in));
   if(read_u64(in) != spec.num_infosets()) {
      throw CheckpointError("checkpoint: infoset count does not match");
   }
   const std::uint64_t n = read_u64(in);
   if(h.num_types < 1 || n != spec.layout().total * static_cast< std::uint64_t >(h.num_types)) {
      throw CheckpointError("checkpoint: entry count does not match");
   }
   h.values.resize(n);
   for(auto& v : h.values) {
      v = read_f64(in);
   }
   return h;
}

}  // namespace

void write_u32(std::ostream& out, std::uint32_t v)
{
   v = to_little(v);
   out.write(reinterpret_cast< const char* >(&v), sizeof(v));
}

void write_u64(std::ostream& out, std::uint64_t v)
{
   v = to_little(v);
   out.write(reinterpret_cast< const char* >(&v), sizeof(v));
}

void write_f64(std::ostream& out, double v)
{
   write_u64(out, std::bit_cast< std::uint64_t >(v));
}

std::uint32_t read_u32(std::istream& in)
{
   std::uint32_t v = 0;
   in.read(reinterpret_cast< char* >(&v), sizeof(v));
   if(! in) {
      throw CheckpointError("checkpoint: truncated stream");
   }
   return to_little(v);
}

std::uint64_t read_u64(std::istream& in)
{
   std::uint64_t v = 0;
   in.read(reinterpret_cast< char* >(&v), sizeof(v));
   if(! in) {
      throw CheckpointError("checkpoint: truncated stream");
   }
   return to_little(v);
}

double read_f64(std::istream& in)
{
   return std::bit_cast< double >(read_u64(in));
}

void save_checkpoint(std::ostream& out, const GameSpec& spec, const RegretTable& table)
{
   write_header(out, spec, kRegretKind, static_cast< std::uint32_t >(table.mode()), table);
}

void save_checkpoint(std::ostream& out, const GameSpec& spec, const StrategyTable& table)
{
   write_header(out, spec, kStrategyKind, static_cast< std::uint32_t >(table.scheme()), table);
}

RegretTable load_regret_checkpoint(std::istream& in, const GameSpec& spec)
{
   const Header h = read_header(in, spec, kRegretKind);
   if(h.mode > 1) {
      throw CheckpointError("checkpoint: unknown regret mode");
   }
   RegretTable t(spec.layout_ptr(), h.num_types, static_cast< RegretMode >(h.mode));
   try {
      t.assign(h.values);
   }
   catch(const ValidationError& e) {
      throw CheckpointError(std::string("checkpoint: ") + e.what());
   }
   return t;
}

StrategyTable load_strategy_checkpoint(std::istream& in, const GameSpec& spec)
{
   const Header h = read_header(in, spec, kStrategyKind);
   if(h.mode > 1) {
      throw CheckpointError("checkpoint: unknown averaging scheme");
   }
   StrategyTable t(spec.layout_ptr(), h.num_types, static_cast< AveragingScheme >(h.mode));
   t.assign(h.values);
   return t;
}

}  // namespace bcfr
