int main() {
    int c = 0;
    int i = 0;
    int j;
    while (i < 3) {
        j = 0;
        while (j < 4) {
            j++;
            c++;
        }
        i++;
    }
    assert(c == 12);
}
