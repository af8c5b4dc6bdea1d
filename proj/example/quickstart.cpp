#include <iostream>
#include <string>
#include <vector>

#include <rfq/rfq.hpp>

int main() {
    // symbols are dense ids in [1..sigma]; here the letters of a short text
    std::string text = "abracadabra";
    std::vector<std::uint32_t> s;
    for (char c : text) s.push_back(static_cast<std::uint32_t>(c - 'a' + 1));

    rfq::RangeIndex idx(s);
    auto letter = [](std::uint32_t a) { return static_cast<char>('a' + a - 1); };

    // elements of S[4..8] occurring more than half the time
    rfq::QueryStats st;
    for (auto [a, count] : idx.majorities(4, 8, 0.5, &st)) std::cout << "majority " << letter(a) << " x" << count << "\n";
    std::cout << "  checked " << st.candidates << " candidates with " << st.sequence_ops() << " rank/select calls\n";

    if (auto m = idx.minority(1, 11, 0.1)) std::cout << "minority " << letter(m->first) << " x" << m->second << "\n";

    auto [mode, count] = idx.mode(1, 11);
    std::cout << "mode " << letter(mode) << " x" << count << "\n";

    // indexes serialize to a byte string and load back unchanged
    rfq::Writer w;
    idx.save(w);
    rfq::Reader r(w.bytes());
    auto back = rfq::RangeIndex::load(r);
    std::cout << "round trip " << (back == idx ? "ok" : "FAILED") << ", " << idx.space_report().total_bits << " bits\n";
    return back == idx ? 0 : 1;
}
