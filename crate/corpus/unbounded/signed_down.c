int main() {
    int x = __VERIFIER_nondet_int();
    while (x > 0)
        x--;
    assert(x <= 0);
}
