int main() {
    unsigned int x = *;
    unsigned int c = 0;
    __VERIFIER_assume(x <= 5);
    while (c < x)
        c++;
    assert(c < 5);
}
