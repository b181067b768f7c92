#include "fatou/serialize.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "fatou/errors.hpp"

namespace fatou {

void write_polymap(std::ostream& os, const PolyMap& m, const std::string& name) {
    size_t count = 0;
    for (int i = 0; i < m.dim(); ++i) count += m.comp(i).terms().size();
    os << "polymap " << name << " dim " << m.dim() << " trunc " << m.trunc() << " terms " << count
       << "\n";
    for (int i = 0; i < m.dim(); ++i)
        for (const auto& [mi, c] : m.comp(i).terms()) {
            os << i;
            for (int j = 0; j < m.dim(); ++j) os << " " << mi.e[j];
            os << " " << format_double(c.real()) << " " << format_double(c.imag()) << "\n";
        }
    os << "end polymap\n";
}

PolyMap read_polymap(std::istream& is, std::string* name_out) {
    std::string tag, name, kw;
    int dim = 0, trunc = 0;
    size_t count = 0;
    is >> tag >> name;
    if (tag != "polymap") throw PreconditionError("read_polymap: bad header");
    is >> kw >> dim >> kw >> trunc >> kw >> count;
    if (dim < 1) throw PreconditionError("read_polymap: bad dimension");
    std::vector<CPoly> comps(dim, CPoly(dim, trunc));
    for (size_t t = 0; t < count; ++t) {
        int comp;
        is >> comp;
        MultiIndex mi = MultiIndex::zeros(dim);
        for (int j = 0; j < dim; ++j) is >> mi.e[j];
        double re, im;
        is >> re >> im;
        if (!is) throw PreconditionError("read_polymap: truncated record");
        if (comp < 0 || comp >= dim) throw PreconditionError("read_polymap: bad component index");
        comps[comp].add_term(mi, {re, im});
    }
    is >> kw;  // "end"
    std::string kw2;
    is >> kw2;
    if (kw != "end" || kw2 != "polymap") throw PreconditionError("read_polymap: bad footer");
    if (name_out) *name_out = name;
    return PolyMap(std::move(comps), trunc);
}

void write_normal_form(std::ostream& os, const NormalFormResult& nf) {
    os << "normalform order " << nf.order_m << " scanlimit " << nf.resonance_scan_limit << "\n";
    os << "lambda " << nf.lambda.size();
    for (const auto& l : nf.lambda) os << " " << format_complex(l);
    os << "\n";
    write_polymap(os, nf.G, "G");
    write_polymap(os, nf.T, "T");
    os << "resonances " << nf.resonances.size() << "\n";
    for (const auto& r : nf.resonances) {
        os << r.component;
        for (int e : r.alpha.e) os << " " << e;
        os << " " << format_double(r.defect) << "\n";
    }
    os << "warnings " << nf.warnings.size() << "\n";
    for (const auto& w : nf.warnings) os << w << "\n";
    os << "end normalform\n";
}

NormalFormResult read_normal_form(std::istream& is) {
    NormalFormResult nf;
    std::string tag, kw;
    is >> tag;
    if (tag != "normalform") throw PreconditionError("read_normal_form: bad header");
    is >> kw >> nf.order_m >> kw >> nf.resonance_scan_limit;
    size_t nl = 0;
    is >> kw >> nl;
    nf.lambda.resize(nl);
    for (auto& l : nf.lambda) {
        double re, im;
        is >> re >> im;
        l = {re, im};
    }
    nf.G = read_polymap(is);
    nf.T = read_polymap(is);
    int dim = nf.G.dim();
    size_t nres = 0;
    is >> kw >> nres;
    for (size_t i = 0; i < nres; ++i) {
        ResonanceRecord r;
        is >> r.component;
        r.alpha = MultiIndex::zeros(dim);
        for (int j = 0; j < dim; ++j) is >> r.alpha.e[j];
        is >> r.defect;
        nf.resonances.push_back(r);
    }
    size_t nwarn = 0;
    is >> kw >> nwarn;
    std::string line;
    std::getline(is, line);  // finish the count line
    for (size_t i = 0; i < nwarn; ++i) {
        std::getline(is, line);
        nf.warnings.push_back(line);
    }
    is >> kw;
    std::string kw2;
    is >> kw2;
    if (kw != "end" || kw2 != "normalform")
        throw PreconditionError("read_normal_form: bad footer");
    return nf;
}

std::string polymap_to_string(const PolyMap& m, const std::string& name) {
    std::ostringstream os;
    write_polymap(os, m, name);
    return os.str();
}

PolyMap polymap_from_string(const std::string& text) {
    std::istringstream is(text);
    return read_polymap(is);
}

}  // namespace fatou
