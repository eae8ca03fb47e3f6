// starbm_cli.cpp — command-line front end (placeholder during bring-up).
#include <cstdio>

int main() {
    std::puts("starbm: not wired up yet");
    return 2;
}
