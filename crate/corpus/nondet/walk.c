int main() {
    int x = 0;
    int i = 0;
    while (i < 4) {
        if (__VERIFIER_nondet_int())
            x++;
        i++;
    }
    assert(x <= 4);
}
