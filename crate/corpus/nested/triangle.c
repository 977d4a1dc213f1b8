int main() {
    unsigned int n = *;
    unsigned int i = 0;
    unsigned int j;
    __VERIFIER_assume(n <= 4);
    while (i < n) {
        j = 0;
        while (j < i)
            j++;
        assert(j == i);
        i++;
    }
}
