// Reads a trace and writes it back: trace_roundtrip csv|json 3|5 <in> <out>
#include <cstdio>
#include <string>

#include <spikehybrid/serialization.hpp>

using namespace spikehybrid;

template <std::size_t N>
std::string again(const std::string& kind, const std::string& text) {
    if (kind == "csv") return arc_to_csv(arc_from_csv<N>(text), N == 5);
    return dump_json(arc_to_json(arc_from_json<N>(json::parse(text))));
}

int main(int argc, char** argv) {
    if (argc != 5) {
        std::fprintf(stderr, "usage: trace_roundtrip csv|json 3|5 <in> <out>\n");
        return 2;
    }
    try {
        const std::string kind = argv[1], dim = argv[2];
        const auto text = read_text_file(argv[3]);
        write_text_file(argv[4], dim == "5" ? again<5>(kind, text) : again<3>(kind, text));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
}
